#include "bohm/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "bohm/error.hpp"

namespace bohm {

MarginalDensity::MarginalDensity(const WaveFunction& wf, double t, std::size_t coord) {
  if (coord >= wf.dimension()) throw DimensionError("marginal coordinate out of range");
  const auto& reg = wf.registry();
  const auto& branches = wf.branches();
  lo_ = std::numeric_limits<double>::infinity();
  hi_ = -lo_;
  for (const auto& members : wf.group_members()) {
    for (std::size_t i : members) {
      for (std::size_t j : members) {
        cplx coef = std::conj(branches[i].amp) * branches[j].amp;
        for (std::size_t c = 0; c < wf.dimension() && coef != 0.0; ++c)
          if (c != coord)
            coef *= overlap(branches[i].packets[c], branches[j].packets[c], reg.coord_mass(c),
                            wf.hbar(), t);
        const double m = reg.coord_mass(coord);
        terms_.push_back({coef, PacketState(branches[i].packets[coord], m, wf.hbar(), t),
                          PacketState(branches[j].packets[coord], m, wf.hbar(), t)});
      }
      const PacketState s(branches[i].packets[coord], reg.coord_mass(coord), wf.hbar(), t);
      lo_ = std::min(lo_, s.center() - 12.0 * s.sigma());
      hi_ = std::max(hi_, s.center() + 12.0 * s.sigma());
    }
  }
}

double MarginalDensity::operator()(double x) const {
  double sum = 0.0;
  for (const auto& term : terms_)
    sum += (term.coef * std::exp(std::conj(term.a.log_value(x)) + term.b.log_value(x))).real();
  return std::max(sum, 0.0);
}

MarginalCdf::MarginalCdf(const MarginalDensity& density, std::size_t grid)
    : x_(grid), F_(grid) {
  const double lo = density.lower(), hi = density.upper();
  const double h = (hi - lo) / static_cast<double>(grid - 1);
  double prev = density(lo);
  x_[0] = lo;
  for (std::size_t i = 1; i < grid; ++i) {
    x_[i] = lo + h * static_cast<double>(i);
    const double f = density(x_[i]);
    F_[i] = F_[i - 1] + 0.5 * h * (prev + f);
    prev = f;
  }
  total_ = F_.back();
  for (double& v : F_) v /= total_;
}

double MarginalCdf::operator()(double x) const {
  if (x <= x_.front()) return 0.0;
  if (x >= x_.back()) return 1.0;
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin());
  const double w = (x - x_[i - 1]) / (x_[i] - x_[i - 1]);
  return F_[i - 1] + w * (F_[i] - F_[i - 1]);
}

double MarginalCdf::quantile(double p) const {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  const auto it = std::lower_bound(F_.begin(), F_.end(), p);
  const std::size_t i = static_cast<std::size_t>(it - F_.begin());
  if (i == 0) return x_.front();
  const double dF = F_[i] - F_[i - 1];
  const double w = dF > 0.0 ? (p - F_[i - 1]) / dF : 0.0;
  return x_[i - 1] + w * (x_[i] - x_[i - 1]);
}

double chi2_survival(double chi2, double dof) {
  if (chi2 <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * chi2);
}

EquivarianceStats equivariance_check(std::span<const double> positions, const WaveFunction& wf,
                                     double t, std::size_t coord, int bins) {
  if (bins < 2) throw std::invalid_argument("equivariance check needs at least 2 bins");
  const std::size_t required = 20 * static_cast<std::size_t>(bins);
  if (positions.size() < required)
    throw InsufficientSamplesError("equivariance check with " + std::to_string(bins) +
                                       " bins needs n >= " + std::to_string(required),
                                   required);

  const MarginalCdf cdf{MarginalDensity(wf, t, coord)};
  EquivarianceStats s;
  s.t = t;
  s.coord = coord;
  s.n = positions.size();
  for (int k = 0; k <= bins; ++k) s.edges.push_back(cdf.quantile(double(k) / bins));

  s.observed.assign(static_cast<std::size_t>(bins), 0);
  for (double x : positions) {
    auto it = std::upper_bound(s.edges.begin() + 1, s.edges.end() - 1, x);
    ++s.observed[static_cast<std::size_t>(it - (s.edges.begin() + 1))];
  }
  const double e = static_cast<double>(s.n) / bins;
  s.expected.assign(static_cast<std::size_t>(bins), e);
  for (std::size_t k = 0; k < s.observed.size(); ++k) {
    const double d = static_cast<double>(s.observed[k]) - e;
    s.chi2 += d * d / e;
  }
  s.dof = bins - 1;
  s.p_value = chi2_survival(s.chi2, s.dof);
  return s;
}

}  // namespace bohm
