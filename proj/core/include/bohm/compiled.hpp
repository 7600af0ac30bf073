#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bohm/integrator.hpp"
#include "bohm/scenario.hpp"

namespace bohm {

/// A validated scenario folded into its wave-function timeline. Immutable and
/// shared read-only by trajectory workers.
struct CompiledScenario {
  ScenarioSpec spec;
  Timeline timeline;
  double interference_time = 0.0;
  double sigma0 = 1.0;               ///< initial width of the geometry particle
  std::size_t transverse_coord = 0;  ///< global index of L's normal coordinate
  std::size_t longitudinal_coord = 0;
  std::optional<std::size_t> pointer_coord;  ///< coordinate read as the flag
  double pointer_origin = 0.0;  ///< pointer's initial center
  double pointer_shift = 0.0;   ///< flag is YES once displaced past shift / 2
  std::optional<double> conversion_time;     ///< effective (post frame-order) time
  std::optional<std::string> record_source;  ///< particle whose spin the pointer reads
};

/// Validates and compiles. Event failures surface as EventError with the
/// event index.
CompiledScenario compile(const ScenarioSpec& spec);

/// Branch-count of every interval, in order.
std::vector<std::size_t> branch_counts(const CompiledScenario& c);

struct BranchTrack {
  double t = 0.0;
  std::size_t interval = 0;
  std::size_t branch = 0;
  std::vector<double> centers;  ///< one per coordinate
  std::vector<double> sigmas;
  SpinAssignment spins;
};

/// Analytic packet centers and widths of every branch at the given times.
std::vector<BranchTrack> branch_tracks(const CompiledScenario& c, std::span<const double> times);

/// Spin-overlap fidelity |<z-up|chi>|^2 of the locally reconstructed
/// geometry-particle spinor chi, density-weighted over evaluation points on L
/// within r_I of I. Other coordinates sit at branch 0's packet centers.
/// Throws std::invalid_argument if the scenario has detector events.
double verify_overlap_spin(const CompiledScenario& c, double t);

/// Same at explicit points of the geometry particle's plane.
double verify_overlap_spin(const CompiledScenario& c, double t, std::span<const Point2> points);

}  // namespace bohm
