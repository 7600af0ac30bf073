#include "bohm/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <stdexcept>

#include "bohm/error.hpp"
#include "bohm/guidance.hpp"

namespace bohm {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

Json point(Point2 p) { return Json::array({p.x, p.y}); }

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json event_json(const UnitaryEvent& e) {
  Json j;
  j["time"] = e.time;
  j["kind"] = to_string(e.kind());
  if (const auto* p = std::get_if<SplitterParams>(&e.params)) {
    j["particle"] = p->particle;
    j["up_offset"] = p->up_offset;
    j["up_velocity"] = p->up_velocity;
    j["down_offset"] = p->down_offset;
    j["down_velocity"] = p->down_velocity;
  } else if (const auto* p = std::get_if<PathSpinCouplingParams>(&e.params)) {
    j["path"] = p->path_particle;
    j["axis"] = p->axis;
    j["value"] = p->value;
    j["side"] = p->below ? "below" : "above";
    j["record"] = p->record_particle;
    j["margin"] = p->margin;
  } else if (const auto* p = std::get_if<PointerConversionParams>(&e.params)) {
    j["source"] = p->source;
    j["pointer"] = p->pointer;
    j["shift"] = p->shift;
    j["duration"] = p->duration;
  } else if (const auto* p = std::get_if<DeflectParams>(&e.params)) {
    j["particle"] = p->particle;
    j["when"] = p->when ? Json(p->when->particle + ":" + to_string(p->when->label))
                        : Json(nullptr);
    j["delta_v"] = p->delta_v;
  }
  return j;
}

std::ofstream open_or_throw(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  return out;
}

}  // namespace

Json scenario_json(const CompiledScenario& c) {
  const ScenarioSpec& s = c.spec;
  Json j;
  j["name"] = s.name;
  Json params;
  params["n"] = s.sampling.n;
  params["seed"] = s.sampling.seed;
  params["antithetic"] = s.sampling.antithetic;
  params["dt"] = s.dt;
  params["t0"] = s.t0;
  params["t1"] = s.t1;
  params["hbar"] = s.hbar;
  params["conversion_time"] = optional_number(s.options.conversion_time);
  params["conversion_time_effective"] = optional_number(c.conversion_time);
  params["interfere"] = s.options.interfere;
  params["frame_order"] = to_string(s.options.frame_order);
  params["proximity_sigmas"] = s.classify.proximity_sigmas;
  params["crossing_band"] = s.classify.crossing_band;
  j["parameters"] = std::move(params);

  Json particles = Json::array();
  for (std::size_t i = 0; i < s.registry.size(); ++i) {
    const Particle& p = s.registry.particles()[i];
    Json pj;
    pj["id"] = p.id;
    pj["mass"] = p.mass;
    pj["coords"] = p.n_coords;
    pj["spin"] = s.initial[i].spin ? Json(to_string(*s.initial[i].spin)) : Json(nullptr);
    pj["center"] = s.initial[i].center;
    pj["velocity"] = s.initial[i].velocity;
    pj["sigma"] = s.initial[i].sigma;
    particles.push_back(std::move(pj));
  }
  j["particles"] = std::move(particles);
  j["coordinates"] = s.registry.coord_names();

  const auto& g = s.geometry;
  Json geo;
  geo["particle"] = g.particle;
  geo["S"] = point(g.S);
  geo["A"] = point(g.A);
  geo["B"] = point(g.B);
  geo["A'"] = point(g.A_prime);
  geo["B'"] = point(g.B_prime);
  geo["I"] = point(g.I);
  geo["line_axis"] = g.line_axis;
  geo["line_value"] = g.line_value;
  geo["u"] = g.u;
  geo["v"] = g.v;
  geo["r_I"] = g.r_I;
  geo["sigma0"] = c.sigma0;
  geo["interference_time"] = c.interference_time;
  if (c.pointer_coord) {
    geo["pointer_coord"] = s.registry.coord_names()[*c.pointer_coord];
    geo["pointer_origin"] = c.pointer_origin;
    geo["pointer_shift"] = c.pointer_shift;
  }
  j["geometry"] = std::move(geo);

  Json events = Json::array();
  for (const auto& e : s.events) events.push_back(event_json(e));
  j["events"] = std::move(events);

  Json counts = Json::array();
  for (const auto& iv : c.timeline.intervals()) counts.push_back(iv.wf.branches().size());
  j["branch_counts"] = std::move(counts);
  return j;
}

Json report_json(const EnsembleReport& r) {
  Json j;
  j["n"] = r.plan.n;
  j["seed"] = r.plan.seed;
  j["dt"] = r.dt;

  Json table = Json::array();
  for (const auto& k : r.counts)
    table.push_back({{"initial_side", to_string(k.initial_side)},
                     {"endpoint", to_string(k.endpoint)},
                     {"flag", to_string(k.flag)},
                     {"count", k.count}});
  j["outcomes"] = std::move(table);

  const auto& rel = r.reliability;
  Json rj;
  rj["classified"] = rel.classified;
  rj["unclassified"] = rel.unclassified;
  rj["flagged"] = rel.flagged;
  rj["yes"] = rel.yes;
  rj["p_yes"] = rel.p_yes();
  rj["endpoint_B_prime"] = rel.endpoint_B;
  rj["flag_matches_endpoint"] = rel.flag_matches_endpoint;
  rj["flag_matches_path"] = rel.flag_matches_path;
  rj["bounced"] = rel.bounced;
  rj["L_crossings"] = {{"0", rel.crossings_0}, {"1", rel.crossings_1},
                       {"more", rel.crossings_more}};
  rj["record_checked"] = rel.record_checked;
  rj["record_dominant"] = rel.record_dominant;
  rj["record_predicts_flag"] = rel.record_predicts;
  rj["record_within_proximity"] = rel.record_within;
  j["reliability"] = std::move(rj);

  Json eq = Json::array();
  for (const auto& e : r.equivariance) {
    Json edges = Json::array();
    for (double x : e.edges) edges.push_back(number_or_null(x));
    eq.push_back({{"t", e.t},
                  {"coord", e.coord},
                  {"n", e.n},
                  {"chi2", e.chi2},
                  {"dof", e.dof},
                  {"p_value", e.p_value},
                  {"edges", std::move(edges)},
                  {"observed", e.observed},
                  {"expected", e.expected}});
  }
  j["equivariance"] = std::move(eq);
  if (!r.equivariance_note.empty()) j["equivariance_note"] = r.equivariance_note;

  Json ab = Json::array();
  for (std::size_t i = 0; i < r.trajectories.size(); ++i)
    if (r.trajectories[i].aborted)
      ab.push_back({{"traj_id", i}, {"diagnostic", r.trajectories[i].diagnostic}});
  j["aborted"] = {{"count", r.aborted}, {"trajectories", std::move(ab)}};
  return j;
}

Json branch_tracks_json(const CompiledScenario& c, std::span<const double> times) {
  const auto names = c.spec.registry.coord_names();
  std::vector<std::string> spin_ids;
  for (const auto& p : c.spec.registry.particles())
    if (p.has_spin) spin_ids.push_back(p.id);

  Json out = Json::array();
  for (const auto& tr : branch_tracks(c, times)) {
    Json centers, sigmas, spins;
    for (std::size_t i = 0; i < names.size(); ++i) {
      centers[names[i]] = tr.centers[i];
      sigmas[names[i]] = tr.sigmas[i];
    }
    for (std::size_t i = 0; i < spin_ids.size(); ++i) spins[spin_ids[i]] = to_string(tr.spins[i]);
    out.push_back({{"t", tr.t},
                   {"interval", tr.interval},
                   {"branch", tr.branch},
                   {"spins", spins.is_null() ? Json::object() : spins},
                   {"centers", centers.is_null() ? Json::object() : centers},
                   {"sigmas", sigmas.is_null() ? Json::object() : sigmas}});
  }
  return out;
}

Json flip_json(const FlipTestResult& f) {
  return {{"tc_early", f.tc_early},
          {"tc_late", f.tc_late},
          {"interference_time", f.interference_time},
          {"flip_fraction", f.flip_fraction},
          {"p_yes_early", f.early.reliability.p_yes()},
          {"p_yes_late", f.late.reliability.p_yes()},
          {"aborted_early", f.early.aborted},
          {"aborted_late", f.late.aborted}};
}

Json signaling_json(const SignalingComparison& s) {
  return {{"n", s.n},
          {"p_yes_interfere", s.p_yes_a},
          {"p_yes_blocked", s.p_yes_b},
          {"delta", s.delta},
          {"threshold", s.threshold},
          {"same_seed", s.same_seed},
          {"pass", s.pass}};
}

void write_trajectory_csv(const EnsembleReport& r, const CompiledScenario& c,
                          const std::string& path) {
  std::ofstream out = open_or_throw(path);
  out << "# schema: " << kTrajectorySchema << "\n";
  out << "traj_id,t";
  for (const auto& name : c.spec.registry.coord_names()) out << "," << name;
  out << ",dominant_branch,dominant_weight\n";

  std::vector<std::unique_ptr<GuidanceField>> fields(c.timeline.intervals().size());
  std::vector<double> w;
  for (std::size_t id = 0; id < r.trajectories.size(); ++id) {
    for (const auto& s : r.trajectories[id].samples) {
      const std::size_t iv = c.timeline.interval_index(s.t);
      if (!fields[iv]) fields[iv] = std::make_unique<GuidanceField>(c.timeline.intervals()[iv].wf);
      w.assign(c.timeline.intervals()[iv].wf.branches().size(), 0.0);
      const double rho = fields[iv]->branch_weights(s.q, s.t, w);
      long dominant = -1;
      double weight = 0.0;
      if (rho >= kDensityFloor) {
        for (std::size_t b = 0; b < w.size(); ++b)
          if (w[b] > weight) {
            weight = w[b];
            dominant = static_cast<long>(b);
          }
      }
      out << id << "," << format_double(s.t);
      for (double x : s.q) out << "," << format_double(x);
      out << "," << dominant << "," << format_double(weight) << "\n";
    }
  }
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void write_json(const Json& j, const std::string& path) {
  std::ofstream out = open_or_throw(path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace bohm
