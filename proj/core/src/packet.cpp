#include "bohm/packet.hpp"

#include <cmath>
#include <numbers>

namespace bohm {

PacketState::PacketState(const GaussianPacket& p, double mass, double hbar, double t) {
  const double s = t - p.birth_time;
  const double w2 = p.width0 * p.width0;
  const double tau = hbar * s / (2.0 * mass * w2);
  const cplx alpha(1.0, tau);

  x0_ = p.center;
  xc_ = p.center + p.velocity * s;
  k_ = mass * p.velocity / hbar;
  sigma_ = p.width0 * std::abs(alpha);
  q_ = 1.0 / (4.0 * w2 * alpha);
  c0_ = -0.25 * std::log(2.0 * std::numbers::pi * w2) - 0.5 * std::log(alpha) +
        cplx(0.0, p.phase - hbar * k_ * k_ * s / (2.0 * mass));
}

void PacketState::quadratic(double x_ref, cplx& a, cplx& b, cplx& c) const noexcept {
  const double d = xc_ - x_ref;
  a = q_;
  b = 2.0 * q_ * d + cplx(0.0, k_);
  c = -q_ * (d * d) + cplx(0.0, k_ * (x_ref - x0_)) + c0_;
}

double packet_sigma(const GaussianPacket& p, double mass, double hbar, double t) {
  const double tau = hbar * (t - p.birth_time) / (2.0 * mass * p.width0 * p.width0);
  return p.width0 * std::sqrt(1.0 + tau * tau);
}

GaussianPacket kick(const GaussianPacket& p, double dv, double mass, double hbar,
                    double t) {
  if (dv == 0.0) return p;
  const double s = t - p.birth_time;
  const double k = mass * p.velocity / hbar;
  const double k_new = mass * (p.velocity + dv) / hbar;

  GaussianPacket out = p;
  out.velocity = p.velocity + dv;
  out.center = p.center - dv * s;
  out.phase = p.phase + k_new * out.center - k * p.center +
              hbar * s * (k_new * k_new - k * k) / (2.0 * mass);
  return out;
}

GaussianPacket translate(const GaussianPacket& p, double dx) {
  GaussianPacket out = p;
  out.center += dx;
  return out;
}

cplx overlap(const GaussianPacket& a, const GaussianPacket& b, double mass, double hbar,
             double t) {
  const PacketState sa(a, mass, hbar, t);
  const PacketState sb(b, mass, hbar, t);
  const double x_ref = 0.5 * (sa.center() + sb.center());

  cplx a1, b1, c1, a2, b2, c2;
  sa.quadratic(x_ref, a1, b1, c1);
  sb.quadratic(x_ref, a2, b2, c2);

  const cplx quad = std::conj(a1) + a2;
  const cplx lin = std::conj(b1) + b2;
  const cplx cst = std::conj(c1) + c2;
  return std::sqrt(std::numbers::pi / quad) * std::exp(lin * lin / (4.0 * quad) + cst);
}

}  // namespace bohm
