#include "bohm/outcome.hpp"

#include <cmath>
#include <limits>

#include "bohm/guidance.hpp"

namespace bohm {

const char* to_string(Endpoint e) {
  switch (e) {
    case Endpoint::A_prime: return "A'";
    case Endpoint::B_prime: return "B'";
    case Endpoint::none: return "NONE";
  }
  return "?";
}

const char* to_string(Flag f) {
  switch (f) {
    case Flag::yes: return "YES";
    case Flag::no: return "NO";
    case Flag::unset: return "UNSET";
  }
  return "?";
}

const char* to_string(Side s) { return s == Side::top ? "TOP" : "BOTTOM"; }

void CrossingCounter::observe(const Configuration& q) {
  const double d = q[coord_] - value_;
  int s = 0;
  if (d > band_) s = 1;
  else if (d < -band_) s = -1;
  if (s == 0) return;
  if (side_ != 0 && s != side_) ++crossings_;
  side_ = s;
}

Side side_of(const CompiledScenario& c, const Configuration& q) {
  return q[c.transverse_coord] - c.spec.geometry.line_value > 0.0 ? Side::top : Side::bottom;
}

Endpoint classify_endpoint(const CompiledScenario& c, const Configuration& q) {
  const WaveFunction& wf = c.timeline.state_at(c.spec.t1);
  const std::size_t k = c.transverse_coord;
  double best = std::numeric_limits<double>::infinity();
  double best_center = 0.0, best_sigma = 1.0;
  for (std::size_t b = 0; b < wf.branches().size(); ++b) {
    const PacketState s(wf.branches()[b].packets[k], wf.registry().coord_mass(k), wf.hbar(),
                        c.spec.t1);
    const double d = std::abs(q[k] - s.center());
    if (d < best) {
      best = d;
      best_center = s.center();
      best_sigma = s.sigma();
    }
  }
  if (!(best <= c.spec.classify.proximity_sigmas * best_sigma)) return Endpoint::none;
  const auto& g = c.spec.geometry;
  const double side = best_center - g.line_value;
  if (side == 0.0) return Endpoint::none;
  return (side > 0.0) == (g.offset(g.A_prime) > 0.0) ? Endpoint::A_prime : Endpoint::B_prime;
}

Flag read_flag(const CompiledScenario& c, const Configuration& q) {
  if (!c.pointer_coord) return Flag::unset;
  const double moved = q[*c.pointer_coord] - c.pointer_origin;
  const double along = c.pointer_shift >= 0.0 ? moved : -moved;
  return along > 0.5 * std::abs(c.pointer_shift) ? Flag::yes : Flag::no;
}

OutcomeRecord classify_outcome(const Trajectory& traj, const CompiledScenario& c,
                               int L_crossings) {
  OutcomeRecord r;
  r.conversion_time_used = c.conversion_time;
  r.L_crossings = L_crossings;
  if (traj.samples.empty()) return r;
  r.initial_side = side_of(c, traj.samples.front().q);
  const auto& last = traj.samples.back();
  if (traj.aborted || last.t != c.spec.t1) return r;
  r.endpoint = classify_endpoint(c, last.q);
  r.flag = read_flag(c, last.q);
  return r;
}

OutcomeRecord classify_outcome(const Trajectory& traj, const CompiledScenario& c) {
  CrossingCounter counter(c.transverse_coord, c.spec.geometry.line_value,
                          c.spec.classify.crossing_band * c.sigma0);
  for (const auto& s : traj.samples) counter.observe(s.q);
  return classify_outcome(traj, c, counter.crossings());
}

std::optional<RecordCheck> record_check(const CompiledScenario& c, const Configuration& q) {
  if (!c.conversion_time || !c.record_source) return std::nullopt;
  const double tc = *c.conversion_time;
  const WaveFunction& wf = c.timeline.state_at(tc);
  const auto& reg = wf.registry();
  if (!reg.particle(*c.record_source).has_spin) return std::nullopt;

  const auto w = branch_weights_at(wf, q, tc);
  RecordCheck r;
  for (std::size_t b = 0; b < w.size(); ++b)
    if (w[b] > r.dominant_weight) {
      r.dominant_weight = w[b];
      r.dominant_branch = b;
    }
  r.dominant = r.dominant_weight > 0.99;
  const Branch& br = wf.branches()[r.dominant_branch];
  r.predicts_yes = br.spins[reg.spin_slot(*c.record_source)] == SpinLabel::down_x;
  const std::size_t k = c.transverse_coord;
  const PacketState s(br.packets[k], reg.coord_mass(k), wf.hbar(), tc);
  r.within_proximity =
      std::abs(q[k] - s.center()) <= c.spec.classify.proximity_sigmas * s.sigma();
  return r;
}

}  // namespace bohm
