#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bohm/wavefunction.hpp"

namespace bohm {

/// Analytic marginal of |psi(., t)|^2 in one coordinate, all others
/// integrated out (cross terms included).
class MarginalDensity {
 public:
  MarginalDensity(const WaveFunction& wf, double t, std::size_t coord);

  double operator()(double x) const;
  /// Interval holding essentially all of the mass (12 sigma past every packet).
  double lower() const noexcept { return lo_; }
  double upper() const noexcept { return hi_; }

 private:
  struct Term {
    cplx coef;
    PacketState a, b;
  };
  std::vector<Term> terms_;
  double lo_ = 0.0, hi_ = 0.0;
};

/// Cumulative distribution of a MarginalDensity tabulated on a fine grid.
class MarginalCdf {
 public:
  explicit MarginalCdf(const MarginalDensity& density, std::size_t grid = 40001);

  double operator()(double x) const;
  double quantile(double p) const;
  double total_mass() const noexcept { return total_; }

 private:
  std::vector<double> x_, F_;
  double total_ = 0.0;
};

struct EquivarianceStats {
  double t = 0.0;
  std::size_t coord = 0;
  std::size_t n = 0;
  std::vector<double> edges;  ///< bins + 1 entries, outer ones infinite
  std::vector<std::size_t> observed;
  std::vector<double> expected;
  double chi2 = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

/// Upper tail P(X > chi2) of a chi-square variable with dof degrees of freedom.
double chi2_survival(double chi2, double dof);

/// Pearson chi-square of the positions against the analytic marginal in
/// `bins` equal-probability bins. Throws InsufficientSamplesError when fewer
/// than 20 expected counts per bin would result, std::invalid_argument for
/// bins < 2.
EquivarianceStats equivariance_check(std::span<const double> positions, const WaveFunction& wf,
                                     double t, std::size_t coord, int bins = 50);

}  // namespace bohm
