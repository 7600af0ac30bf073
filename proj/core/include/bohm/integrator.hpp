#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bohm/events.hpp"
#include "bohm/guidance.hpp"
#include "bohm/wavefunction.hpp"

namespace bohm {

/// Wave function on [begin, end). Each event starts a new interval.
struct Interval {
  double begin = 0.0;
  double end = 0.0;
  WaveFunction wf;
};

/// Piecewise wave-function history obtained by folding apply_event over free
/// evolution. Immutable; safe to share between worker threads.
class Timeline {
 public:
  /// Events must be sorted by time and lie in [t0, t1]. Failures are
  /// rethrown as EventError carrying the event index.
  Timeline(WaveFunction initial, std::vector<UnitaryEvent> events, double t0, double t1);

  double t0() const noexcept { return t0_; }
  double t1() const noexcept { return t1_; }
  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  const std::vector<UnitaryEvent>& events() const noexcept { return events_; }

  /// Index of the interval holding t. Right-continuous: at an event time the
  /// post-event state is returned.
  std::size_t interval_index(double t) const;
  const WaveFunction& state_at(double t) const { return intervals_[interval_index(t)].wf; }

 private:
  double t0_, t1_;
  std::vector<UnitaryEvent> events_;
  std::vector<Interval> intervals_;
};

struct IntegratorOptions {
  double dt = 1e-3;
  double v_max = 1e3;
  int max_halvings = 12;
  double density_floor = kDensityFloor;
  /// Times at which to store samples (sorted, inside [t0, t1]). Empty means
  /// every step boundary.
  std::vector<double> record_times;
  /// Called with (t, Q) at t0 and after every step boundary.
  std::function<void(double, const Configuration&)> observer;
};

struct TrajectorySample {
  double t = 0.0;
  Configuration q;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  std::vector<double> events_seen;
  int density_floor_hits = 0;
  bool aborted = false;
  std::string diagnostic;

  /// Stored sample at exactly time t, if any.
  const TrajectorySample* find(double t) const;
};

/// Classical RK4 on the guidance field with step dt. A step is halved (up to
/// max_halvings times) when a stage sees relative density below
/// 100 * density_floor or speed above v_max. Events are applied at their exact
/// times with Q continuous. A vacuum that persists at the finest step aborts
/// the trajectory (aborted = true, diagnostic set).
///
/// Throws std::invalid_argument for t1 <= t0 or dt <= 0 and VacuumError if Q0
/// itself is below the density floor.
Trajectory integrate_trajectory(const Timeline& timeline, const Configuration& q0, double t0,
                                double t1, const IntegratorOptions& opts);

/// Minimum configuration-space distance over all pairs and shared sample
/// times; +infinity for fewer than two trajectories.
double min_pairwise_separation(std::span<const Trajectory> trajs);

}  // namespace bohm
