#pragma once

#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "bohm/compiled.hpp"
#include "bohm/ensemble.hpp"

namespace bohm {

using Json = nlohmann::ordered_json;

inline constexpr const char* kTrajectorySchema = "bohmsim.trajectories/1";
inline constexpr const char* kSummarySchema = "bohmsim.summary/1";
inline constexpr const char* kManifestSchema = "bohmsim.manifest/1";

/// printf("%.17g")
std::string format_double(double v);

/// Resolved run parameters, geometry and event schedule.
Json scenario_json(const CompiledScenario& c);
/// Outcome table, reliability tallies, equivariance statistics, aborts.
Json report_json(const EnsembleReport& r);
/// Analytic branch centers and widths, keyed by coordinate name.
Json branch_tracks_json(const CompiledScenario& c, std::span<const double> times);
Json flip_json(const FlipTestResult& f);
Json signaling_json(const SignalingComparison& s);

/// First line "# schema: bohmsim.trajectories/1", then the header
/// traj_id,t,<coordinate names>,dominant_branch,dominant_weight and one row per
/// stored sample. Throws std::runtime_error if the file cannot be written.
void write_trajectory_csv(const EnsembleReport& r, const CompiledScenario& c,
                          const std::string& path);

/// Pretty-printed with a trailing newline. Throws std::runtime_error if the
/// file cannot be written.
void write_json(const Json& j, const std::string& path);

}  // namespace bohm
