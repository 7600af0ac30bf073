#pragma once

#include <complex>

namespace bohm {

using cplx = std::complex<double>;

/// One-dimensional free Gaussian packet. The parameters describe the
/// minimum-uncertainty state at birth_time; later times follow from the
/// analytic free-particle propagator.
struct GaussianPacket {
  double center = 0.0;      ///< mean position at birth_time
  double velocity = 0.0;    ///< group velocity
  double width0 = 1.0;      ///< position standard deviation at birth_time
  double birth_time = 0.0;
  double phase = 0.0;       ///< global phase (radians)

  bool operator==(const GaussianPacket&) const = default;
};

/// Packet evaluated at a fixed time. log_value(x) = -q (x - xc)^2 + i k (x - x0) + c0.
class PacketState {
 public:
  PacketState() = default;
  PacketState(const GaussianPacket& p, double mass, double hbar, double t);

  double center() const noexcept { return xc_; }
  double sigma() const noexcept { return sigma_; }
  double wavenumber() const noexcept { return k_; }

  cplx log_value(double x) const noexcept {
    const double d = x - xc_;
    return -q_ * (d * d) + cplx(c0_.real(), c0_.imag() + k_ * (x - x0_));
  }
  cplx value(double x) const noexcept { return std::exp(log_value(x)); }

  /// d/dx log(phi)
  cplx dlog(double x) const noexcept { return -2.0 * q_ * (x - xc_) + cplx(0.0, k_); }

  /// log |phi(x)|^2
  double log_density(double x) const noexcept {
    const double d = x - xc_;
    return 2.0 * (c0_.real() - q_.real() * d * d);
  }
  double density(double x) const noexcept { return std::exp(log_density(x)); }

  /// log of the peak of |phi|^2
  double log_peak_density() const noexcept { return 2.0 * c0_.real(); }

  /// Im(phi* dphi/dx) / |phi|^2 at x.
  double phase_gradient(double x) const noexcept {
    return k_ - 2.0 * q_.imag() * (x - xc_);
  }

  /// Coefficients of log_value in the shifted variable y = x - x_ref:
  /// log_value = -a y^2 + b y + c.
  void quadratic(double x_ref, cplx& a, cplx& b, cplx& c) const noexcept;

 private:
  double x0_ = 0.0;
  double xc_ = 0.0;
  double k_ = 0.0;
  double sigma_ = 1.0;
  cplx q_{0.25, 0.0};
  cplx c0_{};
};

/// Evolves a packet freely to time t (t >= birth_time, mass > 0).
inline PacketState packet_evolve(const GaussianPacket& p, double mass, double hbar,
                                 double t) {
  return PacketState(p, mass, hbar, t);
}

/// sigma(t) = sigma0 * sqrt(1 + (hbar (t - birth) / (2 m sigma0^2))^2)
double packet_sigma(const GaussianPacket& p, double mass, double hbar, double t);

/// Multiplies the packet by exp(i m dv x / hbar) at time t. The result is
/// exactly the boosted state, re-expressed with the original birth time.
GaussianPacket kick(const GaussianPacket& p, double dv, double mass, double hbar,
                    double t);

/// Rigid translation x -> x + dx (no phase change).
GaussianPacket translate(const GaussianPacket& p, double dx);

/// <a|b> for two packets of the same mass. Independent of t under free
/// evolution; t only fixes where the quadratic forms are expanded.
cplx overlap(const GaussianPacket& a, const GaussianPacket& b, double mass, double hbar,
             double t);

}  // namespace bohm
