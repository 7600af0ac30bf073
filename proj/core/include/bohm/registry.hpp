#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bohm {

struct Particle {
  std::string id;
  double mass = 1.0;
  int n_coords = 0;   ///< modeled spatial coordinates (0 for a pure spin carrier)
  bool has_spin = false;

  bool operator==(const Particle&) const = default;
};

/// Ordered particle list. Configuration coordinates are laid out particle by
/// particle in registry order; spin slots likewise for spin-bearing particles.
class ParticleRegistry {
 public:
  ParticleRegistry() = default;
  explicit ParticleRegistry(std::vector<Particle> particles);

  const std::vector<Particle>& particles() const noexcept { return particles_; }
  std::size_t size() const noexcept { return particles_.size(); }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t spin_count() const noexcept { return spin_count_; }

  std::optional<std::size_t> find(std::string_view id) const;
  /// Throws std::out_of_range for an unknown id.
  std::size_t index_of(std::string_view id) const;
  const Particle& particle(std::string_view id) const { return particles_[index_of(id)]; }

  std::size_t coord_offset(std::size_t particle_index) const { return offsets_[particle_index]; }
  std::size_t coord_offset(std::string_view id) const { return offsets_[index_of(id)]; }
  /// Index into a SpinAssignment; throws if the particle carries no spin.
  std::size_t spin_slot(std::string_view id) const;

  /// Owning particle index of a global coordinate.
  std::size_t owner_of(std::size_t coord) const { return owner_[coord]; }
  double coord_mass(std::size_t coord) const { return particles_[owner_[coord]].mass; }

  /// Column-style names: lower-cased id plus _x/_y/_z.
  std::vector<std::string> coord_names() const;

  bool operator==(const ParticleRegistry& o) const { return particles_ == o.particles_; }

 private:
  std::vector<Particle> particles_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> owner_;
  std::vector<std::optional<std::size_t>> spin_slots_;
  std::size_t dimension_ = 0;
  std::size_t spin_count_ = 0;
};

}  // namespace bohm
