#include "bohm/registry.hpp"

#include <cctype>
#include <stdexcept>
#include <unordered_set>

namespace bohm {

ParticleRegistry::ParticleRegistry(std::vector<Particle> particles)
    : particles_(std::move(particles)) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < particles_.size(); ++i) {
    const Particle& p = particles_[i];
    if (p.id.empty()) throw std::invalid_argument("particle id must be non-empty");
    if (!seen.insert(p.id).second)
      throw std::invalid_argument("duplicate particle id '" + p.id + "'");
    if (!(p.mass > 0.0))
      throw std::invalid_argument("particle '" + p.id + "' mass must be > 0");
    if (p.n_coords < 0 || p.n_coords > 3)
      throw std::invalid_argument("particle '" + p.id + "' coordinate count must be 0..3");

    offsets_.push_back(dimension_);
    for (int c = 0; c < p.n_coords; ++c) owner_.push_back(i);
    dimension_ += static_cast<std::size_t>(p.n_coords);
    spin_slots_.push_back(p.has_spin ? std::optional<std::size_t>(spin_count_++)
                                     : std::nullopt);
  }
}

std::optional<std::size_t> ParticleRegistry::find(std::string_view id) const {
  for (std::size_t i = 0; i < particles_.size(); ++i)
    if (particles_[i].id == id) return i;
  return std::nullopt;
}

std::size_t ParticleRegistry::index_of(std::string_view id) const {
  if (auto i = find(id)) return *i;
  throw std::out_of_range("unknown particle '" + std::string(id) + "'");
}

std::size_t ParticleRegistry::spin_slot(std::string_view id) const {
  const auto slot = spin_slots_[index_of(id)];
  if (!slot) throw std::invalid_argument("particle '" + std::string(id) + "' has no spin");
  return *slot;
}

std::vector<std::string> ParticleRegistry::coord_names() const {
  static constexpr const char* axes[] = {"_x", "_y", "_z"};
  std::vector<std::string> names;
  names.reserve(dimension_);
  for (const Particle& p : particles_) {
    std::string base;
    for (char ch : p.id) base += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    for (int c = 0; c < p.n_coords; ++c) names.push_back(base + axes[c]);
  }
  return names;
}

}  // namespace bohm
