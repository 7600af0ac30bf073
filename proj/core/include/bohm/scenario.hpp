#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bohm/events.hpp"
#include "bohm/guidance.hpp"
#include "bohm/registry.hpp"
#include "bohm/sampling.hpp"
#include "bohm/wavefunction.hpp"

namespace bohm {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point2&) const = default;
};

/// Labelled points in the test particle's plane. L is the line where the
/// particle's coordinate `line_axis` equals `line_value`.
struct ScenarioGeometry {
  std::string particle = "P";
  Point2 S, A, B, A_prime, B_prime, I;
  int line_axis = 1;
  double line_value = 0.0;
  double u = 0.0;    ///< transverse path speed
  double v = 0.0;    ///< longitudinal path speed
  double r_I = 0.0;  ///< radius of the interference region

  Point2 mirror(Point2 p) const;
  /// Signed distance of p from L along line_axis.
  double offset(Point2 p) const { return (line_axis == 0 ? p.x : p.y) - line_value; }

  bool operator==(const ScenarioGeometry&) const = default;
};

/// Packet and spin of one particle at t0 (registry order).
struct InitialState {
  std::vector<double> center;
  std::vector<double> velocity;
  double sigma = 1.0;
  std::optional<SpinLabel> spin;

  bool operator==(const InitialState&) const = default;
};

enum class FrameOrder { normal, swapped };
const char* to_string(FrameOrder f);
FrameOrder parse_frame_order(std::string_view text);

struct ScenarioOptions {
  std::optional<double> conversion_time;
  bool interfere = true;
  FrameOrder frame_order = FrameOrder::normal;

  bool operator==(const ScenarioOptions&) const = default;
};

struct ClassificationOptions {
  double proximity_sigmas = 3.0;  ///< endpoint gate, in packet sigmas
  double crossing_band = 1e-6;    ///< L-crossing hysteresis, in units of sigma0

  bool operator==(const ClassificationOptions&) const = default;
};

struct ScenarioSpec {
  std::string name = "custom";
  double hbar = 1.0;
  ParticleRegistry registry;
  std::vector<InitialState> initial;
  ScenarioGeometry geometry;
  std::vector<UnitaryEvent> events;
  double t0 = 0.0;
  double t1 = 1.0;
  double dt = 1e-3;
  SamplingPlan sampling;
  ScenarioOptions options;
  ClassificationOptions classify;

  bool operator==(const ScenarioSpec&) const = default;
};

enum class ScenarioKind { exp1, exp2, exp3, exp4 };
const char* to_string(ScenarioKind k);
std::optional<ScenarioKind> parse_scenario_kind(std::string_view text);

/// Knobs of the built-in experiments. Defaults put the post-split packets
/// 8 sigma either side of L and keep dispersion under 5% over the run.
struct BuiltinParams {
  double sigma = 2.5;
  double separation = 8.0;           ///< h / sigma
  double transverse_speed = 12.5;    ///< u
  double longitudinal_speed = 12.5;  ///< v
  double pointer_sigma = 2.5;
  double pointer_separation = 10.0;  ///< Delta_F / pointer_sigma
  double pointer_duration = 0.5;
  double coupling_time = 0.2;
  std::optional<double> conversion_time;  ///< EXP2 default 0.4, EXP3/EXP4 default 2.5
  bool interfere = true;
  double deflect_time = 0.6;
  double deflect_speed = 25.0;
  FrameOrder frame_order = FrameOrder::normal;
  double dt = 1e-3;
  std::size_t n = 1000;
  std::uint64_t seed = 42;
  bool antithetic = false;
  double hbar = 1.0;
  double mass = 1.0;
};

/// EXP1: bare crossing paths. EXP2: flag on path B. EXP3: path recorded in M's
/// x-spin, converted late. EXP4: EXP3 with conversion time and interfere knobs.
/// Throws ScenarioError(out_of_range) naming the offending field.
ScenarioSpec builtin_scenario(ScenarioKind kind, const BuiltinParams& params = {});

/// Structural and geometric checks. Throws ScenarioError.
void validate(const ScenarioSpec& spec);

/// The t0 state before any event: one branch, packets at the initial states.
WaveFunction initial_wave_function(const ScenarioSpec& spec);

/// Time at which the split packets meet on L.
double interference_time(const ScenarioSpec& spec);

/// Global coordinate index of L's normal coordinate.
LineSpec line_of(const ScenarioSpec& spec);

/// Copy of spec with every SPIN_POINTER_CONVERSION moved to tc (re-sorted).
ScenarioSpec with_conversion_time(ScenarioSpec spec, double tc);

/// Time of the first SPIN_POINTER_CONVERSION, if any.
std::optional<double> conversion_time_of(const ScenarioSpec& spec);

}  // namespace bohm
