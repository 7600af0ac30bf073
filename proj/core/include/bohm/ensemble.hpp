#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "bohm/compiled.hpp"
#include "bohm/outcome.hpp"
#include "bohm/sampling.hpp"
#include "bohm/stats.hpp"

namespace bohm {

struct EnsembleOptions {
  /// Equivariance checkpoints (inside [t0, t1]).
  std::vector<double> checkpoints;
  /// Times at which each trajectory's configuration is kept in the report.
  std::vector<double> sample_times;
  int bins = 50;
  /// 0 picks BOHMSIM_WORKERS from the environment, else the hardware count.
  unsigned workers = 0;
  double v_max = 1e3;
  int max_halvings = 12;
};

struct TrajectoryResult {
  Configuration q0;
  OutcomeRecord outcome;
  std::optional<RecordCheck> record;
  std::vector<TrajectorySample> samples;  ///< at EnsembleOptions::sample_times
  int density_floor_hits = 0;
  bool aborted = false;
  std::string diagnostic;
};

struct OutcomeCount {
  Side initial_side;
  Endpoint endpoint;
  Flag flag;
  std::size_t count = 0;
};

struct ReliabilityStats {
  std::size_t classified = 0;  ///< endpoint assigned
  std::size_t unclassified = 0;
  std::size_t flagged = 0;     ///< classified with a flag reading
  std::size_t yes = 0;
  std::size_t endpoint_B = 0;
  std::size_t flag_matches_endpoint = 0;  ///< YES at B', NO at A'
  std::size_t flag_matches_path = 0;      ///< YES after a bottom start (path B)
  std::size_t bounced = 0;                ///< top start at B' or bottom start at A'
  std::size_t crossings_0 = 0, crossings_1 = 0, crossings_more = 0;
  std::size_t record_checked = 0;
  std::size_t record_dominant = 0;   ///< dominant weight > 0.99 at t_c
  std::size_t record_predicts = 0;   ///< dominant, and its record matches the final flag
  std::size_t record_within = 0;     ///< Q within the proximity gate of that branch

  double p_yes() const { return flagged ? double(yes) / double(flagged) : 0.0; }
};

struct EnsembleReport {
  std::string scenario;
  SamplingPlan plan;
  double dt = 0.0;
  std::vector<TrajectoryResult> trajectories;  ///< index = trajectory id
  std::vector<double> sample_times;
  std::vector<OutcomeCount> counts;
  std::vector<EquivarianceStats> equivariance;
  std::string equivariance_note;  ///< why checkpoints were skipped, if they were
  ReliabilityStats reliability;
  std::size_t aborted = 0;
};

unsigned resolve_workers(unsigned requested);

/// n equally spaced times from t0 to t1 inclusive (n >= 2), or {t1} for n == 1.
std::vector<double> time_grid(double t0, double t1, std::size_t n);

/// Samples Q0 from |psi(t0)|^2 (post t0-events state), integrates every
/// trajectory, classifies it and tallies the report. The result depends only on
/// (scenario, plan, dt, options), never on the worker count. Throws
/// NormalizationError for a non-normalized initial state.
EnsembleReport run_ensemble(const CompiledScenario& c, const SamplingPlan& plan,
                            const EnsembleOptions& opts = {});

struct SignalingComparison {
  std::size_t n = 0;
  double p_yes_a = 0.0;
  double p_yes_b = 0.0;
  double delta = 0.0;
  double threshold = 0.0;
  bool same_seed = false;
  bool pass = false;
};

/// |p(YES|a) - p(YES|b)| against 4 sqrt(0.5 * 0.5 * 2 / n). Throws
/// std::invalid_argument for different n or dt.
SignalingComparison no_signaling_compare(const EnsembleReport& a, const EnsembleReport& b);

/// Fraction of shared initial configurations whose flag differs between the
/// two runs, over those flagged in both. Throws std::invalid_argument unless
/// both runs drew the same Q0 set.
double per_trajectory_flip_fraction(const EnsembleReport& a, const EnsembleReport& b);

struct FlipTestResult {
  double tc_early = 0.0;
  double tc_late = 0.0;
  double interference_time = 0.0;
  double flip_fraction = 0.0;
  EnsembleReport early, late;
};

/// Runs the scenario with the conversion at tc_early and at tc_late on the
/// same Q0 set. Requires tc_early < t_I < tc_late, or tc_early == tc_late.
FlipTestResult delayed_choice_flip_test(const ScenarioSpec& spec, double tc_early,
                                        double tc_late, const SamplingPlan& plan,
                                        const EnsembleOptions& opts = {});

}  // namespace bohm
