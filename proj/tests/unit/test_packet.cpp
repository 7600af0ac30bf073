#include "doctest.h"

#include <cmath>
#include <numbers>

#include "bohm/packet.hpp"
#include "oracles.hpp"

using namespace bohm;

namespace {

double packet_norm(const PacketState& s) {
  const double c = s.center(), w = s.sigma();
  return oracle::simpson([&](double x) { return std::norm(s.value(x)); }, c - 14 * w,
                         c + 14 * w, 20000);
}

oracle::Grid1D sample_grid(const PacketState& s, double lo, double hi, std::size_t n) {
  oracle::Grid1D g;
  g.x0 = lo;
  g.dx = (hi - lo) / static_cast<double>(n - 1);
  g.psi.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.psi[i] = s.value(g.x(i));
  return g;
}

}  // namespace

TEST_CASE("packet at birth is the minimum-uncertainty Gaussian") {
  const GaussianPacket p{0.5, 0.0, 1.0, 0.0, 0.0};
  const PacketState s(p, 1.0, 1.0, 0.0);
  CHECK(s.sigma() == doctest::Approx(1.0));
  CHECK(s.center() == 0.5);
  for (double x : {-1.0, 0.5, 2.0}) {
    const double expect = std::pow(2 * std::numbers::pi, -0.25) * std::exp(-(x - 0.5) * (x - 0.5) / 4);
    CHECK(std::abs(s.value(x) - cplx(expect, 0.0)) < 1e-15);
  }
}

TEST_CASE("width follows the free-spreading law") {
  const GaussianPacket p{0.0, 0.0, 1.0, 0.0, 0.0};
  CHECK(PacketState(p, 1.0, 1.0, 1.0).sigma() == doctest::Approx(std::sqrt(1.25)).epsilon(1e-14));
  CHECK(packet_sigma(p, 1.0, 1.0, 1.0) == doctest::Approx(std::sqrt(1.25)).epsilon(1e-14));
  const GaussianPacket q{0.0, 12.5, 2.5, 0.0, 0.0};
  const double s = PacketState(q, 1.0, 1.0, 3.2).sigma();
  CHECK(s >= 2.5);
  CHECK(s / 2.5 - 1.0 < 0.05);
}

TEST_CASE("center moves with the group velocity") {
  const GaussianPacket p{-3.0, 2.0, 1.5, 0.5, 0.3};
  const PacketState s(p, 2.0, 1.0, 2.0);
  CHECK(s.center() == doctest::Approx(0.0));
  CHECK(s.wavenumber() == doctest::Approx(4.0));
}

TEST_CASE("packet norm is one at all times") {
  for (double t : {0.0, 0.3, 1.0, 3.2, 10.0}) {
    const GaussianPacket p{1.0, -2.0, 0.7, 0.0, 1.2};
    CHECK(std::abs(packet_norm(PacketState(p, 1.5, 1.0, t)) - 1.0) < 1e-9);
  }
}

TEST_CASE("analytic evolution matches a Crank-Nicolson grid solution") {
  struct Case {
    GaussianPacket p;
    double t, lo, hi;
    std::size_t n, steps;
  };
  const Case cases[] = {
      {{0.0, 0.0, 1.0, 0.0, 0.0}, 1.0, -15.0, 15.0, 6001, 2000},
      {{0.0, 1.0, 1.0, 0.0, 0.0}, 1.0, -15.0, 16.0, 6201, 2000},
      {{0.0, 0.0, 2.5, 0.0, 0.0}, 3.2, -30.0, 30.0, 6001, 3200},
  };
  for (const auto& c : cases) {
    oracle::Grid1D g = sample_grid(PacketState(c.p, 1.0, 1.0, 0.0), c.lo, c.hi, c.n);
    oracle::crank_nicolson(g, 1.0, 1.0, c.t, c.steps);
    const PacketState end(c.p, 1.0, 1.0, c.t);
    const double err = oracle::l2_distance(g, [&](double x) { return end.value(x); });
    INFO("sigma0=" << c.p.width0 << " v=" << c.p.velocity << " err=" << err);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("kick multiplies by a plane wave at the kick time") {
  const GaussianPacket p{2.0, 0.5, 1.3, 0.0, 0.4};
  const double t = 0.8, dv = -1.7, m = 1.3, hbar = 1.1;
  const PacketState before(p, m, hbar, t);
  const PacketState after(kick(p, dv, m, hbar, t), m, hbar, t);
  for (double x : {-1.0, 0.0, 2.4, 5.0}) {
    const cplx expect = before.value(x) * std::exp(cplx(0.0, m * dv * x / hbar));
    CHECK(std::abs(after.value(x) - expect) < 1e-13);
  }
  CHECK(kick(p, 0.0, m, hbar, t) == p);
}

TEST_CASE("translate shifts the profile without a phase") {
  const GaussianPacket p{0.0, 1.0, 1.0, 0.0, 0.0};
  const PacketState a(p, 1.0, 1.0, 0.0);
  const PacketState b(translate(p, 3.0), 1.0, 1.0, 0.0);
  CHECK(std::abs(b.value(3.5) - a.value(0.5) * std::exp(cplx(0.0, 0.0))) < 1e-15);
}

TEST_CASE("overlap agrees with quadrature and is time independent") {
  const GaussianPacket a{0.0, 1.0, 1.0, 0.0, 0.2};
  const GaussianPacket b{0.7, 0.4, 1.4, 0.0, -0.5};
  const double t = 0.6;
  const PacketState sa(a, 1.0, 1.0, t), sb(b, 1.0, 1.0, t);
  const double re = oracle::simpson(
      [&](double x) { return (std::conj(sa.value(x)) * sb.value(x)).real(); }, -25, 25, 40000);
  const double im = oracle::simpson(
      [&](double x) { return (std::conj(sa.value(x)) * sb.value(x)).imag(); }, -25, 25, 40000);
  const cplx o = overlap(a, b, 1.0, 1.0, t);
  CHECK(std::abs(o - cplx(re, im)) < 1e-10);
  CHECK(std::abs(overlap(a, b, 1.0, 1.0, 3.0) - o) < 1e-12);
  CHECK(std::abs(overlap(a, a, 1.0, 1.0, 2.0) - 1.0) < 1e-14);
}

TEST_CASE("dlog and phase gradient are the derivatives of log value") {
  const GaussianPacket p{0.3, 2.0, 0.9, 0.0, 0.0};
  const PacketState s(p, 1.0, 1.0, 0.7);
  for (double x : {-0.5, 0.3, 1.8}) {
    const double h = 1e-6 * s.sigma();
    const cplx fd = (s.log_value(x + h) - s.log_value(x - h)) / (2 * h);
    CHECK(std::abs(fd - s.dlog(x)) < 1e-6 * std::abs(s.dlog(x)) + 1e-8);
    CHECK(s.phase_gradient(x) == doctest::Approx(s.dlog(x).imag()).epsilon(1e-12));
  }
}
