#pragma once

#include <cstddef>
#include <optional>

#include "bohm/compiled.hpp"
#include "bohm/integrator.hpp"

namespace bohm {

enum class Endpoint { A_prime, B_prime, none };
enum class Flag { yes, no, unset };
enum class Side { top, bottom };

const char* to_string(Endpoint e);
const char* to_string(Flag f);
const char* to_string(Side s);

struct OutcomeRecord {
  Endpoint endpoint = Endpoint::none;
  Flag flag = Flag::unset;
  int L_crossings = 0;
  Side initial_side = Side::top;
  std::optional<double> conversion_time_used;

  bool operator==(const OutcomeRecord&) const = default;
};

/// Counts sign changes of (Q_transverse - line_value), ignoring excursions
/// inside a band of half-width band_sigmas * sigma0 around L.
class CrossingCounter {
 public:
  CrossingCounter(std::size_t coord, double line_value, double band)
      : coord_(coord), value_(line_value), band_(band) {}

  void observe(const Configuration& q);
  int crossings() const noexcept { return crossings_; }

 private:
  std::size_t coord_;
  double value_;
  double band_;
  int side_ = 0;
  int crossings_ = 0;
};

/// Side of L holding the configuration. TOP is the side of positive offset.
Side side_of(const CompiledScenario& c, const Configuration& q);

/// Endpoint from the final configuration: the nearest branch (in L's normal
/// coordinate) of the t1 state, if within proximity_sigmas of its width, is
/// labelled by whichever of A'/B' lies on the same side of L.
Endpoint classify_endpoint(const CompiledScenario& c, const Configuration& q_final);

/// Flag from the pointer coordinate; UNSET when the scenario has no pointer.
Flag read_flag(const CompiledScenario& c, const Configuration& q_final);

/// Full classification of a trajectory integrated from t0. Crossings are
/// counted over its stored samples, so the trajectory should be sampled at
/// every step (or pass a counter filled by an integrator observer).
OutcomeRecord classify_outcome(const Trajectory& traj, const CompiledScenario& c);
OutcomeRecord classify_outcome(const Trajectory& traj, const CompiledScenario& c,
                               int L_crossings);

/// Record check at the conversion time: who guides Q as the record is made.
struct RecordCheck {
  std::size_t dominant_branch = 0;
  double dominant_weight = 0.0;
  bool dominant = false;        ///< weight > 0.99
  bool predicts_yes = false;    ///< source spin is down_x on the dominant branch
  bool within_proximity = false;  ///< Q within proximity_sigmas of the branch's P center
};

/// nullopt when the scenario has no conversion event.
std::optional<RecordCheck> record_check(const CompiledScenario& c, const Configuration& q_at_tc);

}  // namespace bohm
