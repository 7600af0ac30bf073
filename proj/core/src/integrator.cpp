#include "bohm/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <stdexcept>

#include "bohm/error.hpp"

namespace bohm {

Timeline::Timeline(WaveFunction initial, std::vector<UnitaryEvent> events, double t0, double t1)
    : t0_(t0), t1_(t1), events_(std::move(events)) {
  if (!(t1_ > t0_)) throw std::invalid_argument("timeline needs t1 > t0");
  for (std::size_t i = 0; i < events_.size(); ++i) {
    if (events_[i].time < t0_ || events_[i].time > t1_)
      throw EventError("event outside [t0, t1]", i);
    if (i && events_[i].time < events_[i - 1].time)
      throw EventError("events are not sorted by time", i);
  }

  double begin = t0_;
  WaveFunction current = std::move(initial);
  for (std::size_t i = 0; i < events_.size(); ++i) {
    WaveFunction next = [&] {
      try {
        return apply_event(current, events_[i]);
      } catch (const EventError& e) {
        throw EventError("event " + std::to_string(i) + " (" + to_string(events_[i].kind()) +
                             "): " + e.what(),
                         i);
      } catch (const std::exception& e) {
        throw EventError("event " + std::to_string(i) + ": " + e.what(), i);
      }
    }();
    intervals_.push_back({begin, events_[i].time, std::move(current)});
    begin = events_[i].time;
    current = std::move(next);
  }
  intervals_.push_back({begin, t1_, std::move(current)});
}

std::size_t Timeline::interval_index(double t) const {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < intervals_.size(); ++i)
    if (intervals_[i].begin <= t) idx = i;
  return idx;
}

const TrajectorySample* Trajectory::find(double t) const {
  auto it = std::lower_bound(samples.begin(), samples.end(), t,
                             [](const TrajectorySample& s, double x) { return s.t < x; });
  if (it != samples.end() && it->t == t) return &*it;
  return nullptr;
}

namespace {

enum class StepStatus { ok, abort };

class Stepper {
 public:
  Stepper(const IntegratorOptions& opts, std::size_t dim)
      : opts_(opts), k1_(dim), k2_(dim), k3_(dim), k4_(dim), tmp_(dim) {}

  StepStatus advance(GuidanceField& field, double a, double b, Configuration& q, int depth,
                     Trajectory& traj) {
    const double h = b - a;
    double worst_rho = std::numeric_limits<double>::infinity();
    double worst_speed = 0.0;
    auto stage = [&](std::span<const double> x, double t, std::vector<double>& k) {
      const double rho = field.velocity(x, t, k);
      double s2 = 0.0;
      for (double v : k) s2 += v * v;
      worst_rho = std::min(worst_rho, std::isfinite(rho) ? rho : 0.0);
      worst_speed = std::max(worst_speed, std::isfinite(s2) ? std::sqrt(s2) : HUGE_VAL);
    };

    const std::size_t n = q.size();
    stage(q, a, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = q[i] + 0.5 * h * k1_[i];
    stage(tmp_, a + 0.5 * h, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = q[i] + 0.5 * h * k2_[i];
    stage(tmp_, a + 0.5 * h, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = q[i] + h * k3_[i];
    stage(tmp_, b, k4_);

    const bool refine = worst_rho < 100.0 * opts_.density_floor || worst_speed > opts_.v_max;
    if (refine && depth < opts_.max_halvings) {
      ++traj.density_floor_hits;
      const double mid = a + 0.5 * h;
      if (advance(field, a, mid, q, depth + 1, traj) == StepStatus::abort)
        return StepStatus::abort;
      return advance(field, mid, b, q, depth + 1, traj);
    }
    if (worst_rho < opts_.density_floor || worst_speed > opts_.v_max) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "persistent vacuum near t=%.9g after %d halvings "
                    "(relative density %.3g, speed %.3g)",
                    a, depth, worst_rho, worst_speed);
      traj.diagnostic = buf;
      return StepStatus::abort;
    }
    for (std::size_t i = 0; i < n; ++i)
      q[i] += h / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    return StepStatus::ok;
  }

 private:
  const IntegratorOptions& opts_;
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace

Trajectory integrate_trajectory(const Timeline& timeline, const Configuration& q0, double t0,
                                double t1, const IntegratorOptions& opts) {
  if (!(t1 > t0)) throw std::invalid_argument("integrate_trajectory needs t1 > t0");
  if (!(opts.dt > 0.0)) throw std::invalid_argument("integrate_trajectory needs dt > 0");
  const auto& intervals = timeline.intervals();
  if (q0.size() != intervals.front().wf.dimension())
    throw DimensionError("initial configuration dimension does not match registry");

  // Step boundaries: the dt grid plus every event and record time.
  const double merge_tol = 1e-9 * opts.dt;
  std::vector<double> special;
  for (const auto& e : timeline.events())
    if (e.time > t0 && e.time < t1) special.push_back(e.time);
  for (double r : opts.record_times)
    if (r > t0 && r < t1) special.push_back(r);
  std::vector<double> stops = special;
  for (long k = 1;; ++k) {
    const double g = t0 + static_cast<double>(k) * opts.dt;
    if (g >= t1 - merge_tol) break;
    const bool near_special = std::any_of(special.begin(), special.end(),
                                          [&](double s) { return std::abs(s - g) < merge_tol; });
    if (!near_special) stops.push_back(g);
  }
  stops.push_back(t1);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

  const bool record_all = opts.record_times.empty();
  auto wanted = [&](double t) {
    return record_all ||
           std::binary_search(opts.record_times.begin(), opts.record_times.end(), t);
  };

  std::vector<std::unique_ptr<GuidanceField>> fields(intervals.size());
  auto field_for = [&](double t) -> GuidanceField& {
    const std::size_t idx = timeline.interval_index(t);
    if (!fields[idx]) fields[idx] = std::make_unique<GuidanceField>(intervals[idx].wf);
    return *fields[idx];
  };

  Trajectory traj;
  Configuration q = q0;
  {
    std::vector<double> v(q.size());
    const double rho = field_for(t0).velocity(q, t0, v);
    if (rho < opts.density_floor) throw VacuumError(q, t0, rho);
  }
  for (const auto& e : timeline.events())
    if (e.time == t0) traj.events_seen.push_back(e.time);
  if (wanted(t0)) traj.samples.push_back({t0, q});
  if (opts.observer) opts.observer(t0, q);

  Stepper stepper(opts, q.size());
  double a = t0;
  for (double b : stops) {
    if (stepper.advance(field_for(a), a, b, q, 0, traj) == StepStatus::abort) {
      traj.aborted = true;
      traj.samples.push_back({a, q});
      return traj;
    }
    for (const auto& e : timeline.events())
      if (e.time == b && b < t1) traj.events_seen.push_back(e.time);
    if (wanted(b)) traj.samples.push_back({b, q});
    if (opts.observer) opts.observer(b, q);
    a = b;
  }
  return traj;
}

double min_pairwise_separation(std::span<const Trajectory> trajs) {
  if (trajs.size() < 2) return std::numeric_limits<double>::infinity();
  const auto& ref = trajs.front().samples;
  for (const auto& tr : trajs) {
    if (tr.samples.size() != ref.size())
      throw std::invalid_argument("trajectories do not share sample times");
    for (std::size_t k = 0; k < ref.size(); ++k)
      if (tr.samples[k].t != ref[k].t)
        throw std::invalid_argument("trajectories do not share sample times");
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ref.size(); ++k) {
    for (std::size_t a = 0; a < trajs.size(); ++a) {
      for (std::size_t b = a + 1; b < trajs.size(); ++b) {
        const auto& qa = trajs[a].samples[k].q;
        const auto& qb = trajs[b].samples[k].q;
        double d2 = 0.0;
        for (std::size_t i = 0; i < qa.size(); ++i) d2 += (qa[i] - qb[i]) * (qa[i] - qb[i]);
        best = std::min(best, std::sqrt(d2));
      }
    }
  }
  return best;
}

}  // namespace bohm
