#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bohm/wavefunction.hpp"

namespace bohm {

enum class EventKind { splitter, path_spin_coupling, spin_pointer_conversion, deflect };

const char* to_string(EventKind k);
EventKind parse_event_kind(std::string_view text);

/// Splits every branch into an up_x and a down_x copy (amplitudes / sqrt 2).
/// Each copy of the particle's packets is translated by its offset and given
/// the stated velocity.
struct SplitterParams {
  std::string particle;
  std::vector<double> up_offset, up_velocity;
  std::vector<double> down_offset, down_velocity;

  bool operator==(const SplitterParams&) const = default;
};

/// Flips the record particle's spin on branches whose path-particle packet
/// lies on the selected side of `axis == value`.
struct PathSpinCouplingParams {
  std::string path_particle;
  int axis = 1;
  double value = 0.0;
  bool below = true;
  std::string record_particle;
  double margin = 3.0;  ///< required clearance from the boundary, in packet sigmas

  bool operator==(const PathSpinCouplingParams&) const = default;
};

/// On branches where `source` is down_x, starts the pointer moving so that
/// it is displaced by `shift` after `duration`.
struct PointerConversionParams {
  std::string source;
  std::string pointer;
  double shift = 0.0;
  double duration = 1.0;

  double velocity() const { return shift / duration; }
  bool operator==(const PointerConversionParams&) const = default;
};

struct SpinSelector {
  std::string particle;
  SpinLabel label = SpinLabel::up_x;

  bool operator==(const SpinSelector&) const = default;
};

/// Velocity change on the particle's packets, on all branches or on those
/// matching the selector.
struct DeflectParams {
  std::string particle;
  std::optional<SpinSelector> when;
  std::vector<double> delta_v;

  bool operator==(const DeflectParams&) const = default;
};

struct UnitaryEvent {
  double time = 0.0;
  std::variant<SplitterParams, PathSpinCouplingParams, PointerConversionParams,
               DeflectParams>
      params;

  EventKind kind() const { return static_cast<EventKind>(params.index()); }
  bool operator==(const UnitaryEvent&) const = default;
};

/// Applies an impulsive event at e.time. Norm is preserved. Throws EventError
/// for ill-posed events (ambiguous path membership, bad particle references).
WaveFunction apply_event(const WaveFunction& wf, const UnitaryEvent& e);

}  // namespace bohm
