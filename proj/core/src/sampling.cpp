#include "bohm/sampling.hpp"

#include <cmath>
#include <numbers>

#include "bohm/error.hpp"

namespace bohm {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed ^ mix64(stream * kGamma + 0x632be59bd9b4e019ULL))) {}

std::uint64_t CounterRng::next() noexcept { return mix64(key_ + (++counter_) * kGamma); }

double CounterRng::uniform() noexcept {
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double CounterRng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

namespace {

// |amp|^2-weighted mixture of the branch Gaussians. Exact for incoherent
// wave functions; a proposal for rejection sampling otherwise.
Configuration draw_mixture(const WaveFunction& wf, double t, CounterRng& rng, bool mirror,
                           const std::vector<double>& cumulative) {
  double u = rng.uniform();
  if (mirror) u = 1.0 - u;
  u *= cumulative.back();
  std::size_t b = 0;
  while (b + 1 < cumulative.size() && u >= cumulative[b]) ++b;

  const auto states = branch_states(wf, b, t);
  Configuration q(states.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double z = rng.normal();
    q[i] = states[i].center() + states[i].sigma() * (mirror ? -z : z);
  }
  return q;
}

}  // namespace

Configuration sample_configuration(const WaveFunction& wf, double t, CounterRng& rng,
                                   bool mirror) {
  const auto& branches = wf.branches();
  std::vector<double> cumulative;
  double acc = 0.0;
  for (const auto& b : branches) cumulative.push_back(acc += std::norm(b.amp));
  if (wf.incoherent()) return draw_mixture(wf, t, rng, mirror, cumulative);

  // |sum_{b in g} a_b phi_b|^2 <= |g| sum_{b in g} |a_b phi_b|^2
  std::size_t bound = 1;
  for (const auto& m : wf.group_members()) bound = std::max(bound, m.size());
  std::vector<std::vector<PacketState>> states;
  for (std::size_t b = 0; b < branches.size(); ++b) states.push_back(branch_states(wf, b, t));
  for (;;) {
    Configuration q = draw_mixture(wf, t, rng, mirror, cumulative);
    double proposal = 0.0;
    for (std::size_t b = 0; b < branches.size(); ++b) {
      double ld = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) ld += states[b][i].log_density(q[i]);
      proposal += std::norm(branches[b].amp) * std::exp(ld);
    }
    double rho = 0.0;
    for (const auto& c : spinor_components_at(wf, q, t)) rho += std::norm(c.value);
    double u = rng.uniform();
    if (mirror) u = 1.0 - u;
    if (u * static_cast<double>(bound) * proposal < rho) return q;
  }
}

Configuration sample_index(const WaveFunction& wf, double t0, const SamplingPlan& plan,
                           std::size_t index) {
  const bool mirror = plan.antithetic && (index % 2 == 1);
  const std::uint64_t stream = plan.antithetic ? index / 2 : index;
  CounterRng rng(plan.seed, stream);
  return sample_configuration(wf, t0, rng, mirror);
}

std::vector<Configuration> sample_initial(const WaveFunction& wf, double t0,
                                          const SamplingPlan& plan) {
  const double n = norm(wf, t0);
  if (std::abs(n - 1.0) > 1e-9)
    throw NormalizationError("cannot sample a wave function with norm " + std::to_string(n), n);
  std::vector<Configuration> out;
  out.reserve(plan.n);
  for (std::size_t i = 0; i < plan.n; ++i) out.push_back(sample_index(wf, t0, plan, i));
  return out;
}

}  // namespace bohm
