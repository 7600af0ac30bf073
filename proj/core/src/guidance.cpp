#include "bohm/guidance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bohm/error.hpp"

namespace bohm {

GuidanceField::GuidanceField(const WaveFunction& wf)
    : wf_(&wf), t_cached_(std::numeric_limits<double>::quiet_NaN()) {
  const auto& reg = wf.registry();
  const std::size_t dim = reg.dimension();
  const std::size_t nb = wf.branches().size();
  states_.resize(nb * dim);
  log_peak_.resize(nb);
  logw_.resize(nb);
  logv_.resize(nb);
  grad_.resize(wf.spin_groups().size() * dim);
  for (const Branch& b : wf.branches())
    log_amp2_.push_back(b.amp == cplx{} ? -std::numeric_limits<double>::infinity()
                                        : std::log(std::norm(b.amp)));
  for (std::size_t i = 0; i < dim; ++i) hbar_over_m_.push_back(wf.hbar() / reg.coord_mass(i));
}

void GuidanceField::refresh(double t) {
  if (t == t_cached_) return;
  const auto& reg = wf_->registry();
  const std::size_t dim = reg.dimension();
  log_max_peak_ = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < wf_->branches().size(); ++b) {
    double lp = log_amp2_[b];
    for (std::size_t i = 0; i < dim; ++i) {
      states_[b * dim + i] =
          PacketState(wf_->branches()[b].packets[i], reg.coord_mass(i), wf_->hbar(), t);
      lp += states_[b * dim + i].log_peak_density();
    }
    log_peak_[b] = lp;
    log_max_peak_ = std::max(log_max_peak_, lp);
  }
  t_cached_ = t;
}

double GuidanceField::accumulate(std::span<const double> q, double& den,
                                 std::span<double> num) {
  const std::size_t dim = q.size();
  const std::size_t nb = wf_->branches().size();
  std::fill(num.begin(), num.end(), 0.0);
  den = 0.0;

  if (wf_->incoherent()) {
    // Distinct spin assignments never interfere: densities and currents add.
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < nb; ++b) {
      double lw = log_amp2_[b];
      for (std::size_t i = 0; i < dim; ++i) lw += states_[b * dim + i].log_density(q[i]);
      logw_[b] = lw;
      m = std::max(m, lw);
    }
    if (!std::isfinite(m)) return m;
    for (std::size_t b = 0; b < nb; ++b) {
      const double w = std::exp(logw_[b] - m);
      if (w == 0.0) continue;
      den += w;
      for (std::size_t i = 0; i < dim; ++i)
        num[i] += w * states_[b * dim + i].phase_gradient(q[i]);
    }
    return m;
  }

  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < nb; ++b) {
    const Branch& br = wf_->branches()[b];
    if (br.amp == cplx{}) {
      logv_[b] = cplx(-std::numeric_limits<double>::infinity(), 0.0);
      continue;
    }
    cplx lv = std::log(br.amp);
    for (std::size_t i = 0; i < dim; ++i) lv += states_[b * dim + i].log_value(q[i]);
    logv_[b] = lv;
    m = std::max(m, lv.real());
  }
  if (!std::isfinite(m)) return m;
  const auto& groups = wf_->group_members();
  for (std::size_t g = 0; g < groups.size(); ++g) {
    cplx psi{};
    cplx* grad = grad_.data() + g * dim;
    std::fill(grad, grad + dim, cplx{});
    for (std::size_t b : groups[g]) {
      if (!std::isfinite(logv_[b].real())) continue;
      const cplx v = std::exp(logv_[b] - m);
      psi += v;
      for (std::size_t i = 0; i < dim; ++i) grad[i] += v * states_[b * dim + i].dlog(q[i]);
    }
    den += std::norm(psi);
    for (std::size_t i = 0; i < dim; ++i) num[i] += (std::conj(psi) * grad[i]).imag();
  }
  return 2.0 * m;
}

double GuidanceField::velocity(std::span<const double> q, double t, std::span<double> v) {
  refresh(t);
  double den = 0.0;
  const double scale = accumulate(q, den, v);
  if (!(den > 0.0) || !std::isfinite(scale)) {
    std::fill(v.begin(), v.end(), 0.0);
    return 0.0;
  }
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = hbar_over_m_[i] * v[i] / den;
  return den * std::exp(scale - log_max_peak_);
}

double GuidanceField::current(std::span<const double> q, double t, std::span<double> j) {
  refresh(t);
  double den = 0.0;
  const double scale = accumulate(q, den, j);
  if (!(den > 0.0) || !std::isfinite(scale)) {
    std::fill(j.begin(), j.end(), 0.0);
    return 0.0;
  }
  const double s = std::exp(scale);
  for (std::size_t i = 0; i < j.size(); ++i) j[i] *= hbar_over_m_[i] * s;
  return den * s;
}

double GuidanceField::branch_weights(std::span<const double> q, double t,
                                     std::span<double> w) {
  refresh(t);
  const std::size_t dim = q.size();
  const std::size_t nb = wf_->branches().size();
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t b = 0; b < nb; ++b) {
    double lw = log_amp2_[b];
    for (std::size_t i = 0; i < dim; ++i) lw += states_[b * dim + i].log_density(q[i]);
    logw_[b] = lw;
    m = std::max(m, lw);
  }
  if (!std::isfinite(m)) {
    std::fill(w.begin(), w.end(), 0.0);
    return 0.0;
  }
  double sum = 0.0;
  for (std::size_t b = 0; b < nb; ++b) sum += (w[b] = std::exp(logw_[b] - m));
  for (std::size_t b = 0; b < nb; ++b) w[b] /= sum;

  std::vector<double> scratch(dim);
  return velocity(q, t, scratch);
}

namespace {

void check_dimension(const WaveFunction& wf, std::span<const double> q) {
  if (q.size() != wf.dimension())
    throw DimensionError("configuration has " + std::to_string(q.size()) +
                         " coordinates, registry expects " + std::to_string(wf.dimension()));
}

}  // namespace

std::vector<double> velocity_at(const WaveFunction& wf, std::span<const double> q, double t,
                                double density_floor) {
  check_dimension(wf, q);
  GuidanceField field(wf);
  std::vector<double> v(q.size());
  const double rho = field.velocity(q, t, v);
  if (rho < density_floor) throw VacuumError(std::vector<double>(q.begin(), q.end()), t, rho);
  return v;
}

std::vector<double> branch_weights_at(const WaveFunction& wf, std::span<const double> q,
                                      double t, double density_floor) {
  check_dimension(wf, q);
  GuidanceField field(wf);
  std::vector<double> w(wf.branches().size());
  const double rho = field.branch_weights(q, t, w);
  if (rho < density_floor) throw VacuumError(std::vector<double>(q.begin(), q.end()), t, rho);
  return w;
}

double FluxProfile::max_abs_current() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, std::abs(s.current));
  return m;
}

double FluxProfile::integrated_flux() const {
  double sum = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i)
    sum += 0.5 * (samples[i].current + samples[i - 1].current) *
           (samples[i].position - samples[i - 1].position);
  return sum;
}

FluxProfile current_across_line(const WaveFunction& wf, const LineSpec& line, double t,
                                int n_samples) {
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  const auto& reg = wf.registry();
  if (line.coord >= reg.dimension()) throw DimensionError("line coordinate out of range");
  const std::size_t owner = reg.owner_of(line.coord);
  const Particle& part = reg.particles()[owner];
  if (part.n_coords < 2)
    throw std::invalid_argument("line particle needs a second coordinate to sample along");
  const std::size_t first = reg.coord_offset(owner);
  const std::size_t local = line.coord - first;
  const std::size_t along = first + (local + 1) % static_cast<std::size_t>(part.n_coords);

  FluxProfile out;
  out.along_coord = along;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t b = 0; b < wf.branches().size(); ++b) {
    const auto states = branch_states(wf, b, t);
    lo = std::min(lo, states[along].center() - 6.0 * states[along].sigma());
    hi = std::max(hi, states[along].center() + 6.0 * states[along].sigma());
    double speed2 = 0.0;
    for (int c = 0; c < part.n_coords; ++c) {
      const double v = wf.branches()[b].packets[first + static_cast<std::size_t>(c)].velocity;
      speed2 += v * v;
    }
    out.peak_current_scale =
        std::max(out.peak_current_scale, branch_peak_density(wf, b, t) * std::sqrt(speed2));
  }

  Configuration q(reg.dimension());
  const auto base = branch_states(wf, 0, t);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = base[i].center();
  q[line.coord] = line.value;

  GuidanceField field(wf);
  std::vector<double> j(q.size());
  for (int k = 0; k < n_samples; ++k) {
    const double pos = n_samples == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * k / (n_samples - 1);
    q[along] = pos;
    field.current(q, t, j);
    out.samples.push_back({pos, j[line.coord]});
  }
  return out;
}

}  // namespace bohm
