#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bohm/packet.hpp"
#include "bohm/registry.hpp"

namespace bohm {

enum class SpinLabel : std::uint8_t { up_x, down_x };

const char* to_string(SpinLabel s);
SpinLabel parse_spin_label(std::string_view text);

/// Joint spin assignment indexed by registry spin slot.
using SpinAssignment = std::vector<SpinLabel>;

/// Point in configuration space, one entry per registry coordinate.
using Configuration = std::vector<double>;

/// amp * prod_i packets[i](Q_i) |spins>
struct Branch {
  cplx amp{1.0, 0.0};
  std::vector<GaussianPacket> packets;  ///< one per registry coordinate
  SpinAssignment spins;                 ///< one per spin slot

  bool operator==(const Branch&) const = default;
};

/// Finite sum of spin-labelled Gaussian product branches. Immutable value;
/// all operations on it are pure.
class WaveFunction {
 public:
  WaveFunction(ParticleRegistry registry, std::vector<Branch> branches, double hbar = 1.0);

  const ParticleRegistry& registry() const noexcept { return registry_; }
  const std::vector<Branch>& branches() const noexcept { return branches_; }
  double hbar() const noexcept { return hbar_; }
  std::size_t dimension() const noexcept { return registry_.dimension(); }

  /// Distinct joint spin assignments in order of first appearance, and the
  /// branch indices contributing to each.
  const std::vector<SpinAssignment>& spin_groups() const noexcept { return groups_; }
  const std::vector<std::vector<std::size_t>>& group_members() const noexcept {
    return members_;
  }
  /// True when every spin group holds exactly one branch (no coherent sums).
  bool incoherent() const noexcept { return incoherent_; }

  bool operator==(const WaveFunction& o) const {
    return hbar_ == o.hbar_ && registry_ == o.registry_ && branches_ == o.branches_;
  }

 private:
  ParticleRegistry registry_;
  std::vector<Branch> branches_;
  double hbar_;
  std::vector<SpinAssignment> groups_;
  std::vector<std::vector<std::size_t>> members_;
  bool incoherent_ = true;
};

/// Coherent amplitude for one joint spin assignment.
struct SpinComponent {
  SpinAssignment spins;
  cplx value;
};

/// Per-spin-assignment amplitude and its gradient over all coordinates.
struct SpinGradient {
  SpinAssignment spins;
  cplx value;
  std::vector<cplx> grad;
};

/// Evaluates psi at Q, one entry per distinct joint spin assignment.
std::vector<SpinComponent> spinor_components_at(const WaveFunction& wf,
                                                std::span<const double> q, double t);

/// Analytic gradient of each spin component.
std::vector<SpinGradient> gradient_at(const WaveFunction& wf, std::span<const double> q,
                                      double t);

/// Sum over spin assignments of the coherent overlap integrals.
double norm(const WaveFunction& wf, double t = 0.0);

/// Per-coordinate packet states of one branch at time t.
std::vector<PacketState> branch_states(const WaveFunction& wf, std::size_t branch, double t);

/// Peak of |branch|^2 (amplitude included) at time t.
double branch_peak_density(const WaveFunction& wf, std::size_t branch, double t);

}  // namespace bohm
