#include "bohm/compiled.hpp"

#include <stdexcept>

#include "bohm/error.hpp"

namespace bohm {

CompiledScenario compile(const ScenarioSpec& spec) {
  validate(spec);
  const auto& reg = spec.registry;
  const auto& g = spec.geometry;
  const std::size_t p_idx = reg.index_of(g.particle);
  const std::size_t base = reg.coord_offset(p_idx);

  CompiledScenario c{spec,
                     Timeline(initial_wave_function(spec), spec.events, spec.t0, spec.t1),
                     interference_time(spec),
                     spec.initial[p_idx].sigma,
                     base + static_cast<std::size_t>(g.line_axis),
                     base + static_cast<std::size_t>(1 - g.line_axis),
                     std::nullopt,
                     0.0,
                     0.0,
                     std::nullopt,
                     std::nullopt};

  for (const auto& e : spec.events) {
    const auto* pc = std::get_if<PointerConversionParams>(&e.params);
    if (!pc) continue;
    const std::size_t f = reg.index_of(pc->pointer);
    if (reg.particles()[f].n_coords < 1)
      throw ScenarioError(ScenarioError::Kind::inconsistent,
                          "pointer '" + pc->pointer + "' has no coordinate", pc->pointer);
    c.pointer_coord = reg.coord_offset(f);
    c.pointer_origin = spec.initial[f].center[0];
    c.pointer_shift = pc->shift;
    c.conversion_time = e.time;
    c.record_source = pc->source;
    break;
  }
  return c;
}

std::vector<std::size_t> branch_counts(const CompiledScenario& c) {
  std::vector<std::size_t> out;
  for (const auto& iv : c.timeline.intervals()) out.push_back(iv.wf.branches().size());
  return out;
}

std::vector<BranchTrack> branch_tracks(const CompiledScenario& c, std::span<const double> times) {
  std::vector<BranchTrack> out;
  for (double t : times) {
    const std::size_t iv = c.timeline.interval_index(t);
    const WaveFunction& wf = c.timeline.intervals()[iv].wf;
    for (std::size_t b = 0; b < wf.branches().size(); ++b) {
      BranchTrack tr{t, iv, b, {}, {}, wf.branches()[b].spins};
      for (const auto& s : branch_states(wf, b, t)) {
        tr.centers.push_back(s.center());
        tr.sigmas.push_back(s.sigma());
      }
      out.push_back(std::move(tr));
    }
  }
  return out;
}

namespace {

void require_detector_free(const CompiledScenario& c) {
  for (const auto& e : c.spec.events)
    if (e.kind() == EventKind::path_spin_coupling ||
        e.kind() == EventKind::spin_pointer_conversion)
      throw std::invalid_argument(
          "overlap spin reconstruction needs a scenario without detector events");
}

}  // namespace

double verify_overlap_spin(const CompiledScenario& c, double t, std::span<const Point2> points) {
  require_detector_free(c);
  if (points.empty()) throw std::invalid_argument("no evaluation points");
  const WaveFunction& wf = c.timeline.state_at(t);
  const auto& reg = wf.registry();
  const std::size_t slot = reg.spin_slot(c.spec.geometry.particle);
  const std::size_t base = reg.coord_offset(c.spec.geometry.particle);

  Configuration q(wf.dimension());
  const auto states = branch_states(wf, 0, t);
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = states[i].center();

  double weighted = 0.0, total = 0.0;
  for (const Point2& p : points) {
    q[base] = p.x;
    q[base + 1] = p.y;
    cplx up{}, down{};
    for (const auto& comp : spinor_components_at(wf, q, t))
      (comp.spins[slot] == SpinLabel::up_x ? up : down) += comp.value;
    const double rho = std::norm(up) + std::norm(down);
    if (!(rho > 0.0)) continue;
    // <z-up| = (<up_x| + <down_x|) / sqrt 2
    const double fidelity = std::norm(up + down) / (2.0 * rho);
    weighted += rho * fidelity;
    total += rho;
  }
  if (!(total > 0.0))
    throw VacuumError(q, t, 0.0);
  return weighted / total;
}

double verify_overlap_spin(const CompiledScenario& c, double t) {
  const auto& g = c.spec.geometry;
  const int n = 41;
  std::vector<Point2> pts;
  for (int i = 0; i < n; ++i) {
    const double s = -g.r_I + 2.0 * g.r_I * i / (n - 1);
    pts.push_back(g.line_axis == 1 ? Point2{g.I.x + s, g.line_value}
                                   : Point2{g.line_value, g.I.y + s});
  }
  return verify_overlap_spin(c, t, pts);
}

}  // namespace bohm
