#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bohm/wavefunction.hpp"

namespace bohm {

/// Relative density floor (against the largest per-branch peak density)
/// below which the guidance velocity is treated as undefined.
inline constexpr double kDensityFloor = 1e-12;

/// The line coords[coord] == value.
struct LineSpec {
  std::size_t coord = 0;
  double value = 0.0;

  bool operator==(const LineSpec&) const = default;
};

/// Velocity-field evaluator bound to one wave function. Caches the
/// time-dependent packet states between calls at the same t, so one instance
/// must not be shared between threads. The wave function must outlive it.
class GuidanceField {
 public:
  explicit GuidanceField(const WaveFunction& wf);

  const WaveFunction& wave_function() const noexcept { return *wf_; }

  /// Writes v_k = (hbar/m_k) sum_s Im(psi_s* d_k psi_s) / sum_s |psi_s|^2 into
  /// v and returns the relative density rho(Q) / max_b peak_b. Never throws;
  /// callers decide what to do below the floor.
  double velocity(std::span<const double> q, double t, std::span<double> v);

  /// Absolute density rho(Q); writes the probability current rho * v into j.
  double current(std::span<const double> q, double t, std::span<double> j);

  /// weight_b = |branch_b(Q)|^2 / sum_b' |branch_b'(Q)|^2. Returns the
  /// relative density like velocity().
  double branch_weights(std::span<const double> q, double t, std::span<double> w);

 private:
  void refresh(double t);
  // Returns log scale L; den * exp(L) = rho, num[i] * exp(L) = (m_i/hbar) j_i.
  double accumulate(std::span<const double> q, double& den, std::span<double> num);

  const WaveFunction* wf_;
  double t_cached_;
  std::vector<PacketState> states_;  // branch-major
  std::vector<double> log_amp2_;
  std::vector<double> log_peak_;     // per branch, amplitude included
  double log_max_peak_ = 0.0;
  std::vector<double> hbar_over_m_;
  std::vector<double> logw_;
  std::vector<cplx> logv_;
  std::vector<cplx> grad_;
};

/// Guidance velocity at Q. Throws VacuumError below the density floor.
std::vector<double> velocity_at(const WaveFunction& wf, std::span<const double> q, double t,
                                double density_floor = kDensityFloor);

/// Per-branch weights at Q (sum to 1). Throws VacuumError below the floor.
std::vector<double> branch_weights_at(const WaveFunction& wf, std::span<const double> q,
                                      double t, double density_floor = kDensityFloor);

struct FluxSample {
  double position = 0.0;  ///< coordinate along the line
  double current = 0.0;   ///< rho * v_normal
};

struct FluxProfile {
  std::size_t along_coord = 0;
  std::vector<FluxSample> samples;
  /// max_b (peak density of branch b) * |velocity of b's line-particle packet|
  double peak_current_scale = 0.0;

  double max_abs_current() const;
  /// Trapezoidal integral of the normal current along the line.
  double integrated_flux() const;
};

/// Normal probability current sampled along the line, within 6 sigma of the
/// branch packets in the along-line coordinate. The along-line coordinate is
/// the next coordinate of the same particle; other coordinates sit at branch 0's
/// packet centers.
FluxProfile current_across_line(const WaveFunction& wf, const LineSpec& line, double t,
                                int n_samples);

}  // namespace bohm
