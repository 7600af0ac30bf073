#include "doctest.h"

#include <cmath>
#include <numbers>

#include "bohm/compiled.hpp"
#include "bohm/error.hpp"
#include "bohm/wavefunction.hpp"

using namespace bohm;

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

WaveFunction single_2d(double vx = 0.0, double vy = 0.0) {
  ParticleRegistry reg({{"P", 1.0, 2, true}});
  Branch b{{1.0, 0.0}, {{0.0, vx, 1.0, 0.0, 0.0}, {0.0, vy, 1.0, 0.0, 0.0}}, {SpinLabel::up_x}};
  return WaveFunction(reg, {b});
}

const CompiledScenario& exp1() {
  static const CompiledScenario c = compile(builtin_scenario(ScenarioKind::exp1));
  return c;
}

}  // namespace

TEST_CASE("single branch at the centers is the product of peak values") {
  const WaveFunction wf = single_2d();
  const auto comps = spinor_components_at(wf, std::vector<double>{0.0, 0.0}, 0.0);
  REQUIRE(comps.size() == 1);
  const double peak = std::pow(2 * std::numbers::pi, -0.25);
  CHECK(std::abs(comps[0].value - cplx(peak * peak, 0.0)) < 1e-15);
}

TEST_CASE("crossing state in region I has two spin components") {
  const auto& c = exp1();
  const WaveFunction& wf = c.timeline.state_at(c.interference_time);
  const auto comps =
      spinor_components_at(wf, std::vector<double>{c.spec.geometry.I.x + 1.0, 0.5},
                           c.interference_time);
  REQUIRE(comps.size() == 2);
  CHECK(comps[0].spins != comps[1].spins);
  CHECK(std::abs(comps[0].value) > 1e-4);
  CHECK(std::abs(comps[1].value) > 1e-4);
}

TEST_CASE("amplitudes vanish far outside the packets") {
  const auto& c = exp1();
  const WaveFunction& wf = c.timeline.state_at(1.0);
  const auto states = branch_states(wf, 0, 1.0);
  for (const auto& comp : spinor_components_at(
           wf, std::vector<double>{states[0].center() + 11 * states[0].sigma(), 60.0}, 1.0))
    CHECK(std::abs(comp.value) < 1e-20);
}

TEST_CASE("spin components equal per-branch sums over matching labels") {
  ParticleRegistry reg({{"P", 1.0, 1, true}});
  const Branch a{{0.6, 0.0}, {{0.0, 1.0, 1.0, 0.0, 0.0}}, {SpinLabel::up_x}};
  const Branch b{{0.0, 0.5}, {{0.4, -1.0, 1.2, 0.0, 0.3}}, {SpinLabel::up_x}};
  const Branch d{{0.3, 0.3}, {{-0.2, 0.0, 0.8, 0.0, 0.0}}, {SpinLabel::down_x}};
  const WaveFunction wf(reg, {a, b, d});
  const double x = 0.25, t = 0.4;
  auto val = [&](const Branch& br) {
    return br.amp * PacketState(br.packets[0], 1.0, 1.0, t).value(x);
  };
  const auto comps = spinor_components_at(wf, std::vector<double>{x}, t);
  REQUIRE(comps.size() == 2);
  CHECK(std::abs(comps[0].value - (val(a) + val(b))) < 1e-15);
  CHECK(std::abs(comps[1].value - val(d)) < 1e-15);
}

TEST_CASE("gradient of a stationary real Gaussian at its center is zero") {
  const WaveFunction wf = single_2d();
  const auto g = gradient_at(wf, std::vector<double>{0.0, 0.0}, 0.0);
  REQUIRE(g.size() == 1);
  for (const cplx& d : g[0].grad) CHECK(std::abs(d) < 1e-15);
}

TEST_CASE("analytic gradient matches central differences") {
  const auto& c = exp1();
  for (double t : {0.0, 0.8, 1.6, 2.4}) {
    const WaveFunction& wf = c.timeline.state_at(t);
    for (const auto& q : {std::vector<double>{c.spec.geometry.v * t + 0.7, 1.3},
                          std::vector<double>{c.spec.geometry.v * t - 1.1, -2.2}}) {
      const auto grads = gradient_at(wf, q, t);
      for (std::size_t s = 0; s < grads.size(); ++s) {
        for (std::size_t k = 0; k < q.size(); ++k) {
          const double h = 1e-6 * c.sigma0;
          auto qp = q, qm = q;
          qp[k] += h;
          qm[k] -= h;
          const cplx fd = (spinor_components_at(wf, qp, t)[s].value -
                           spinor_components_at(wf, qm, t)[s].value) /
                          (2 * h);
          const double scale = std::abs(grads[s].grad[k]);
          if (std::norm(grads[s].value) < 1e-12) continue;
          CHECK(std::abs(fd - grads[s].grad[k]) <= 1e-6 * scale + 1e-14);
        }
      }
    }
  }
}

TEST_CASE("moving packet: phase gradient gives m v / hbar at the center") {
  const WaveFunction wf = single_2d(3.0, -1.5);
  const auto g = gradient_at(wf, std::vector<double>{0.0, 0.0}, 0.0);
  const cplx psi = g[0].value;
  CHECK((std::conj(psi) * g[0].grad[0]).imag() / std::norm(psi) == doctest::Approx(3.0));
  CHECK((std::conj(psi) * g[0].grad[1]).imag() / std::norm(psi) == doctest::Approx(-1.5));
}

TEST_CASE("crossing state: transverse current is odd about L") {
  const auto& c = exp1();
  for (double t : {0.5, 1.2, 1.6, 2.0}) {
    const WaveFunction& wf = c.timeline.state_at(t);
    for (double y : {0.3, 2.0, 7.5}) {
      const double x = c.spec.geometry.v * t + 0.4;
      auto j = [&](double yy) {
        double num = 0.0, den = 0.0;
        for (const auto& g : gradient_at(wf, std::vector<double>{x, yy}, t)) {
          num += (std::conj(g.value) * g.grad[1]).imag();
          den += std::norm(g.value);
        }
        return num / den;
      };
      CHECK(std::abs(j(y) + j(-y)) < 1e-10);
    }
  }
}

TEST_CASE("norm") {
  CHECK(norm(single_2d()) == doctest::Approx(1.0).epsilon(1e-14));

  // Two orthogonal-spin branches after the split.
  const auto& c = exp1();
  CHECK(std::abs(norm(c.timeline.state_at(0.0)) - 1.0) < 1e-12);

  // Same spin, identical packets, amplitudes 1/sqrt2: |sqrt2 phi|^2 = 2.
  ParticleRegistry reg({{"P", 1.0, 1, true}});
  const Branch b{{kInvSqrt2, 0.0}, {{0.0, 0.0, 1.0, 0.0, 0.0}}, {SpinLabel::up_x}};
  CHECK(norm(WaveFunction(reg, {b, b})) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("dimension mismatch is rejected") {
  const WaveFunction wf = single_2d();
  CHECK_THROWS_AS(spinor_components_at(wf, std::vector<double>{0.0}, 0.0), DimensionError);
  CHECK_THROWS_AS(gradient_at(wf, std::vector<double>{0.0, 1.0, 2.0}, 0.0), DimensionError);
}
