#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "bohm/wavefunction.hpp"

namespace bohm {

struct SamplingPlan {
  std::size_t n = 1000;
  std::uint64_t seed = 42;
  bool antithetic = false;

  bool operator==(const SamplingPlan&) const = default;
};

/// Counter-based generator: output k of stream (seed, stream) is
/// splitmix64(key + k * gamma), with key derived from both. Any draw can be
/// reproduced without touching other streams, so parallel schedules cannot
/// change results.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() noexcept;
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Standard normal via Box-Muller (both outputs used).
  double normal() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Draws one configuration from |psi(., t)|^2 using the given stream.
/// `mirror` turns the draw into the antithetic partner of the unmirrored one.
Configuration sample_configuration(const WaveFunction& wf, double t, CounterRng& rng,
                                   bool mirror = false);

/// n i.i.d. draws from |psi(., t0)|^2; trajectory i uses stream i (or stream
/// i/2 mirrored on odd i when antithetic). Throws NormalizationError when
/// |norm - 1| > 1e-9.
std::vector<Configuration> sample_initial(const WaveFunction& wf, double t0,
                                          const SamplingPlan& plan);

/// Draw for a single trajectory index of a plan.
Configuration sample_index(const WaveFunction& wf, double t0, const SamplingPlan& plan,
                           std::size_t index);

}  // namespace bohm
