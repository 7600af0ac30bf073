#include "bohm/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "bohm/error.hpp"

namespace bohm {

unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BOHMSIM_WORKERS")) {
    unsigned v = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, v);
    if (ec == std::errc() && ptr == end && v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> time_grid(double t0, double t1, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {t1};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = i + 1 == n ? t1 : t0 + (t1 - t0) * static_cast<double>(i) / double(n - 1);
  return out;
}

namespace {

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

TrajectoryResult run_one(const CompiledScenario& c, const WaveFunction& wf0,
                         const SamplingPlan& plan, std::size_t index,
                         const IntegratorOptions& base, const std::vector<double>& keep) {
  TrajectoryResult r;
  r.q0 = sample_index(wf0, c.spec.t0, plan, index);
  r.outcome.conversion_time_used = c.conversion_time;
  r.outcome.initial_side = side_of(c, r.q0);
  if (r.q0[c.transverse_coord] == c.spec.geometry.line_value) {
    r.aborted = true;
    r.diagnostic = "initial configuration lies exactly on L";
    return r;
  }

  CrossingCounter counter(c.transverse_coord, c.spec.geometry.line_value,
                          c.spec.classify.crossing_band * c.sigma0);
  IntegratorOptions opts = base;
  opts.observer = [&counter](double, const Configuration& q) { counter.observe(q); };

  Trajectory traj;
  try {
    traj = integrate_trajectory(c.timeline, r.q0, c.spec.t0, c.spec.t1, opts);
  } catch (const VacuumError& e) {
    r.aborted = true;
    r.diagnostic = e.what();
    return r;
  }
  r.density_floor_hits = traj.density_floor_hits;
  r.aborted = traj.aborted;
  r.diagnostic = traj.diagnostic;
  r.outcome = classify_outcome(traj, c, counter.crossings());

  if (!traj.aborted && c.conversion_time) {
    if (const auto* s = traj.find(*c.conversion_time)) {
      try {
        r.record = record_check(c, s->q);
      } catch (const VacuumError&) {
        r.record = RecordCheck{};
      }
    }
  }
  for (auto& s : traj.samples)
    if (std::binary_search(keep.begin(), keep.end(), s.t)) r.samples.push_back(std::move(s));
  return r;
}

}  // namespace

EnsembleReport run_ensemble(const CompiledScenario& c, const SamplingPlan& plan,
                            const EnsembleOptions& opts) {
  if (plan.n < 1) throw std::invalid_argument("sampling plan needs n >= 1");
  const double t0 = c.spec.t0, t1 = c.spec.t1;
  for (double t : opts.checkpoints)
    if (t < t0 || t > t1) throw std::invalid_argument("checkpoint outside [t0, t1]");
  for (double t : opts.sample_times)
    if (t < t0 || t > t1) throw std::invalid_argument("sample time outside [t0, t1]");

  const WaveFunction& wf0 = c.timeline.state_at(t0);
  const double n0 = norm(wf0, t0);
  if (std::abs(n0 - 1.0) > 1e-9)
    throw NormalizationError("initial state norm " + std::to_string(n0), n0);

  const std::vector<double> keep = sorted_unique(opts.sample_times);
  const std::vector<double> checkpoints = sorted_unique(opts.checkpoints);
  std::vector<double> record = keep;
  record.insert(record.end(), checkpoints.begin(), checkpoints.end());
  record.push_back(t0);
  record.push_back(t1);
  if (c.conversion_time) record.push_back(*c.conversion_time);
  std::vector<double> keep_all = sorted_unique(record);
  std::vector<double> merged_keep = keep;
  merged_keep.insert(merged_keep.end(), checkpoints.begin(), checkpoints.end());
  merged_keep = sorted_unique(std::move(merged_keep));

  IntegratorOptions base;
  base.dt = c.spec.dt;
  base.v_max = opts.v_max;
  base.max_halvings = opts.max_halvings;
  base.record_times = keep_all;

  EnsembleReport rep;
  rep.scenario = c.spec.name;
  rep.plan = plan;
  rep.dt = c.spec.dt;
  rep.sample_times = keep;
  rep.trajectories.resize(plan.n);

  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_workers(opts.workers), plan.n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= plan.n) return;
      try {
        rep.trajectories[i] = run_one(c, wf0, plan, i, base, merged_keep);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = plan.n;
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Reduction in index order.
  auto& rel = rep.reliability;
  for (const auto& tr : rep.trajectories) {
    if (tr.aborted) {
      ++rep.aborted;
      continue;
    }
    const auto& o = tr.outcome;
    auto it = std::find_if(rep.counts.begin(), rep.counts.end(), [&](const OutcomeCount& k) {
      return k.initial_side == o.initial_side && k.endpoint == o.endpoint && k.flag == o.flag;
    });
    if (it == rep.counts.end()) rep.counts.push_back({o.initial_side, o.endpoint, o.flag, 1});
    else ++it->count;

    if (o.L_crossings == 0) ++rel.crossings_0;
    else if (o.L_crossings == 1) ++rel.crossings_1;
    else ++rel.crossings_more;

    if (tr.record && o.flag != Flag::unset) {
      ++rel.record_checked;
      if (tr.record->dominant) {
        ++rel.record_dominant;
        if (tr.record->predicts_yes == (o.flag == Flag::yes)) ++rel.record_predicts;
      }
      if (tr.record->within_proximity) ++rel.record_within;
    }

    if (o.endpoint == Endpoint::none) {
      ++rel.unclassified;
      continue;
    }
    ++rel.classified;
    const bool at_B = o.endpoint == Endpoint::B_prime;
    const bool top = o.initial_side == Side::top;
    if (at_B) ++rel.endpoint_B;
    if (at_B == top) ++rel.bounced;
    if (o.flag != Flag::unset) {
      const bool yes = o.flag == Flag::yes;
      ++rel.flagged;
      if (yes) ++rel.yes;
      if (yes == at_B) ++rel.flag_matches_endpoint;
      if (yes == !top) ++rel.flag_matches_path;
    }
  }
  std::sort(rep.counts.begin(), rep.counts.end(), [](const OutcomeCount& a, const OutcomeCount& b) {
    return std::tuple(a.initial_side, a.endpoint, a.flag) <
           std::tuple(b.initial_side, b.endpoint, b.flag);
  });

  const std::size_t required = 20 * static_cast<std::size_t>(std::max(opts.bins, 2));
  if (!checkpoints.empty() && plan.n - rep.aborted < required) {
    rep.equivariance_note = "skipped: " + std::to_string(opts.bins) + " bins need n >= " +
                            std::to_string(required) + " completed trajectories";
  } else {
    for (double t : checkpoints) {
      std::vector<double> pos;
      for (const auto& tr : rep.trajectories) {
        if (tr.aborted) continue;
        auto it = std::find_if(tr.samples.begin(), tr.samples.end(),
                               [&](const TrajectorySample& s) { return s.t == t; });
        if (it != tr.samples.end()) pos.push_back(it->q[c.transverse_coord]);
      }
      rep.equivariance.push_back(
          equivariance_check(pos, c.timeline.state_at(t), t, c.transverse_coord, opts.bins));
    }
  }

  // Checkpoint-only samples are not part of the stored trajectories.
  if (keep.size() != merged_keep.size())
    for (auto& tr : rep.trajectories)
      std::erase_if(tr.samples, [&](const TrajectorySample& s) {
        return !std::binary_search(keep.begin(), keep.end(), s.t);
      });
  return rep;
}

SignalingComparison no_signaling_compare(const EnsembleReport& a, const EnsembleReport& b) {
  if (a.plan.n != b.plan.n) throw std::invalid_argument("no-signaling comparison needs equal n");
  if (a.dt != b.dt) throw std::invalid_argument("no-signaling comparison needs equal dt");
  SignalingComparison s;
  s.n = a.plan.n;
  s.p_yes_a = a.reliability.p_yes();
  s.p_yes_b = b.reliability.p_yes();
  s.delta = std::abs(s.p_yes_a - s.p_yes_b);
  s.threshold = 4.0 * std::sqrt(0.5 * 0.5 * 2.0 / static_cast<double>(s.n));
  s.same_seed = a.plan.seed == b.plan.seed;
  s.pass = s.delta < s.threshold;
  return s;
}

double per_trajectory_flip_fraction(const EnsembleReport& a, const EnsembleReport& b) {
  if (a.trajectories.size() != b.trajectories.size())
    throw std::invalid_argument("flip comparison needs equal n");
  std::size_t considered = 0, flips = 0;
  for (std::size_t i = 0; i < a.trajectories.size(); ++i) {
    const auto& ta = a.trajectories[i];
    const auto& tb = b.trajectories[i];
    if (ta.q0 != tb.q0) throw std::invalid_argument("flip comparison needs the same Q0 set");
    if (ta.aborted || tb.aborted) continue;
    if (ta.outcome.flag == Flag::unset || tb.outcome.flag == Flag::unset) continue;
    ++considered;
    if (ta.outcome.flag != tb.outcome.flag) ++flips;
  }
  return considered ? double(flips) / double(considered) : 0.0;
}

FlipTestResult delayed_choice_flip_test(const ScenarioSpec& spec, double tc_early,
                                        double tc_late, const SamplingPlan& plan,
                                        const EnsembleOptions& opts) {
  const double t_I = interference_time(spec);
  if (tc_early > tc_late)
    throw std::invalid_argument("flip test needs tc_early <= tc_late");
  if (tc_early != tc_late && !(tc_early < t_I && t_I < tc_late))
    throw std::invalid_argument("flip test needs tc_early < t_I < tc_late");

  const CompiledScenario early = compile(with_conversion_time(spec, tc_early));
  const CompiledScenario late = compile(with_conversion_time(spec, tc_late));
  FlipTestResult r;
  r.tc_early = tc_early;
  r.tc_late = tc_late;
  r.interference_time = t_I;
  r.early = run_ensemble(early, plan, opts);
  r.late = run_ensemble(late, plan, opts);
  r.flip_fraction = per_trajectory_flip_fraction(r.early, r.late);
  return r;
}

}  // namespace bohm
