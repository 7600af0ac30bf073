#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "bohm/compiled.hpp"
#include "bohm/error.hpp"
#include "bohm/guidance.hpp"
#include "oracles.hpp"

using namespace bohm;

namespace {

WaveFunction packet_2d(double y0, double vx, double vy, double sigma = 1.0) {
  ParticleRegistry reg({{"P", 1.0, 2, false}});
  Branch b{{1.0, 0.0}, {{0.0, vx, sigma, 0.0, 0.0}, {y0, vy, sigma, 0.0, 0.0}}, {}};
  return WaveFunction(reg, {b});
}

const CompiledScenario& compiled(ScenarioKind k) {
  static const CompiledScenario cs[] = {compile(builtin_scenario(ScenarioKind::exp1)),
                                        compile(builtin_scenario(ScenarioKind::exp2)),
                                        compile(builtin_scenario(ScenarioKind::exp3))};
  return cs[static_cast<int>(k)];
}

}  // namespace

TEST_CASE("stationary real Gaussian at its center has zero velocity") {
  const auto v = velocity_at(packet_2d(0.0, 0.0, 0.0), std::vector<double>{0.0, 0.0}, 0.0);
  CHECK(v[0] == 0.0);
  CHECK(v[1] == 0.0);
}

TEST_CASE("moving packet at its center moves with the group velocity") {
  const WaveFunction wf = packet_2d(1.0, 3.0, -2.0);
  for (double t : {0.0, 0.5, 2.0}) {
    const auto v = velocity_at(wf, std::vector<double>{3.0 * t, 1.0 - 2.0 * t}, t);
    CHECK(v[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(v[1] == doctest::Approx(-2.0).epsilon(1e-12));
  }
}

TEST_CASE("velocity equals (hbar/m) times the finite-difference phase gradient") {
  const WaveFunction wf = packet_2d(0.5, 1.0, 0.7, 1.3);
  const std::vector<double> q{0.9, -0.4};
  const double t = 0.8;
  const auto v = velocity_at(wf, q, t);
  for (std::size_t k = 0; k < 2; ++k) {
    const double h = 1e-6 * 1.3;
    auto qp = q, qm = q;
    qp[k] += h;
    qm[k] -= h;
    const cplx a = spinor_components_at(wf, qp, t)[0].value;
    const cplx b = spinor_components_at(wf, qm, t)[0].value;
    const double phase_grad = std::arg(a / b) / (2 * h);
    CHECK(std::abs(v[k] - phase_grad) < 1e-6 * std::abs(v[k]));
  }
}

TEST_CASE("velocity field of the crossing state has no component across L") {
  const auto& c = compiled(ScenarioKind::exp1);
  for (double t : {0.2, 1.0, 1.6, 2.2, 3.0}) {
    const WaveFunction& wf = c.timeline.state_at(t);
    for (double dx : {-5.0, 0.0, 3.0}) {
      const auto v = velocity_at(wf, std::vector<double>{c.spec.geometry.v * t + dx, 0.0}, t);
      CHECK(std::abs(v[1]) < 1e-12);
    }
  }
}

TEST_CASE("transverse velocity is odd in the transverse coordinate (EXP1, EXP3)") {
  for (auto k : {ScenarioKind::exp1, ScenarioKind::exp3}) {
    const auto& c = compiled(k);
    for (double t : {0.3, 1.5, 1.6, 1.7, 2.4}) {
      const WaveFunction& wf = c.timeline.state_at(t);
      const auto st = branch_states(wf, 0, t);
      for (double y : {0.5, 3.0, 9.0}) {
        std::vector<double> qa(wf.dimension()), qb;
        for (std::size_t i = 0; i < qa.size(); ++i) qa[i] = st[i].center();
        qa[c.longitudinal_coord] += 0.8;
        qa[c.transverse_coord] = y;
        qb = qa;
        qb[c.transverse_coord] = -y;
        const auto va = velocity_at(wf, qa, t, 0.0);
        const auto vb = velocity_at(wf, qb, t, 0.0);
        const double scale = std::max(1.0, std::abs(va[c.transverse_coord]));
        CHECK(std::abs(va[c.transverse_coord] + vb[c.transverse_coord]) < 1e-10 * scale);
      }
    }
  }
}

TEST_CASE("vacuum regions raise VacuumError with the configuration and time") {
  const WaveFunction wf = packet_2d(0.0, 0.0, 0.0);
  try {
    velocity_at(wf, std::vector<double>{0.0, 40.0}, 0.25);
    FAIL("expected VacuumError");
  } catch (const VacuumError& e) {
    CHECK(e.time() == 0.25);
    CHECK(e.configuration()[1] == 40.0);
    CHECK(e.relative_density() < kDensityFloor);
  }
  CHECK_THROWS_AS(branch_weights_at(wf, std::vector<double>{0.0, 40.0}, 0.0), VacuumError);
}

TEST_CASE("branch weights") {
  CHECK(branch_weights_at(packet_2d(0, 0, 0), std::vector<double>{0.3, 0.1}, 0.0)[0] ==
        doctest::Approx(1.0));

  const auto& c1 = compiled(ScenarioKind::exp1);
  const auto w = branch_weights_at(c1.timeline.state_at(c1.interference_time),
                                   std::vector<double>{c1.spec.geometry.I.x, 0.0},
                                   c1.interference_time);
  REQUIRE(w.size() == 2);
  CHECK(w[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(w[1] == doctest::Approx(0.5).epsilon(1e-12));

  // After the flag moves, Q in the "No" region is guided by the A-path branch.
  const auto& c2 = compiled(ScenarioKind::exp2);
  const double t = 1.0;
  const WaveFunction& wf = c2.timeline.state_at(t);
  const auto st = branch_states(wf, 0, t);
  std::vector<double> q{st[0].center(), st[1].center() + 0.5, c2.pointer_origin + 1.0};
  const auto w2 = branch_weights_at(wf, q, t);
  CHECK(wf.branches()[0].spins[0] == SpinLabel::up_x);
  CHECK(w2[0] > 0.99);
}

TEST_CASE("probability current across L vanishes for the crossing state") {
  const auto& c = compiled(ScenarioKind::exp1);
  const LineSpec line = line_of(c.spec);
  for (double t : {0.0, 0.8, 1.6, 2.4, 3.2}) {
    const FluxProfile f = current_across_line(c.timeline.state_at(t), line, t, 201);
    CHECK(f.peak_current_scale > 0.0);
    CHECK(f.max_abs_current() < 1e-8 * f.peak_current_scale);
  }
}

TEST_CASE("no current far from every packet") {
  const WaveFunction wf = packet_2d(-30.0, 1.0, 1.0, 1.0);
  const FluxProfile f = current_across_line(wf, {1, 0.0}, 0.0, 51);
  for (const auto& s : f.samples) CHECK(std::abs(s.current) < 1e-20);
}

TEST_CASE("flux through L over time equals the probability mass transferred") {
  const double y0 = -3.0, vy = 4.0, sigma = 1.0;
  const WaveFunction wf = packet_2d(y0, 0.5, vy, sigma);
  const double ta = 0.25, tb = 1.25;

  // Mass above L from quadrature of the y-marginal |phi_y|^2.
  auto mass_above = [&](double t) {
    const PacketState s(wf.branches()[0].packets[1], 1.0, 1.0, t);
    return oracle::simpson([&](double y) { return s.density(y); }, 0.0,
                           s.center() + 15 * s.sigma() + 15, 20000);
  };
  const double transferred = mass_above(tb) - mass_above(ta);

  const double flux = oracle::simpson(
      [&](double t) { return current_across_line(wf, {1, 0.0}, t, 801).integrated_flux(); }, ta,
      tb, 200);
  CHECK(transferred > 0.5);
  CHECK(std::abs(flux - transferred) < 1e-3);
}
