#include "bohm/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bohm/error.hpp"

namespace bohm {

Point2 ScenarioGeometry::mirror(Point2 p) const {
  if (line_axis == 0) return {2.0 * line_value - p.x, p.y};
  return {p.x, 2.0 * line_value - p.y};
}

const char* to_string(FrameOrder f) { return f == FrameOrder::normal ? "normal" : "swapped"; }

FrameOrder parse_frame_order(std::string_view text) {
  if (text == "normal") return FrameOrder::normal;
  if (text == "swapped") return FrameOrder::swapped;
  throw std::invalid_argument("frame order must be normal or swapped");
}

const char* to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::exp1: return "EXP1";
    case ScenarioKind::exp2: return "EXP2";
    case ScenarioKind::exp3: return "EXP3";
    case ScenarioKind::exp4: return "EXP4";
  }
  return "?";
}

std::optional<ScenarioKind> parse_scenario_kind(std::string_view text) {
  for (auto k : {ScenarioKind::exp1, ScenarioKind::exp2, ScenarioKind::exp3, ScenarioKind::exp4})
    if (text == to_string(k)) return k;
  return std::nullopt;
}

namespace {

using Kind = ScenarioError::Kind;

void require(bool ok, const char* field, const std::string& why) {
  if (!ok) throw ScenarioError(Kind::out_of_range, std::string(field) + ": " + why, field);
}

double scale_of(const ScenarioGeometry& g) {
  double s = 1.0;
  for (const Point2& p : {g.S, g.A, g.B, g.A_prime, g.B_prime, g.I})
    s = std::max({s, std::abs(p.x), std::abs(p.y)});
  return s;
}

std::string show(Point2 p) {
  return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
}

}  // namespace

ScenarioSpec builtin_scenario(ScenarioKind kind, const BuiltinParams& p) {
  require(p.sigma > 0.0, "sigma", "must be > 0");
  require(p.separation >= 6.0, "separation", "must be >= 6 sigma");
  require(p.transverse_speed > 0.0, "transverse_speed", "must be > 0");
  require(p.longitudinal_speed >= 0.0, "longitudinal_speed", "must be >= 0");
  require(p.pointer_sigma > 0.0, "pointer_sigma", "must be > 0");
  require(p.pointer_separation >= 6.0, "pointer_separation", "must be >= 6");
  require(p.pointer_duration > 0.0, "pointer_duration", "must be > 0");
  require(p.dt > 0.0 && p.dt <= 0.1, "dt", "must be in (0, 0.1]");
  require(p.n >= 1, "n", "must be >= 1");
  require(p.hbar > 0.0, "hbar", "must be > 0");
  require(p.mass > 0.0, "mass", "must be > 0");

  const double h = p.separation * p.sigma;
  const double u = p.transverse_speed;
  const double v = p.longitudinal_speed;
  const double t0 = 0.0;
  const double t_meet = h / u;
  const double t1 = 2.0 * t_meet;

  ScenarioSpec spec;
  spec.name = to_string(kind);
  spec.hbar = p.hbar;
  spec.t0 = t0;
  spec.t1 = t1;
  spec.dt = p.dt;
  spec.sampling = {p.n, p.seed, p.antithetic};

  auto& g = spec.geometry;
  g.particle = "P";
  g.S = {0.0, 0.0};
  g.A = {0.0, h};
  g.B = {0.0, -h};
  g.I = {v * t_meet, 0.0};
  g.A_prime = {2.0 * v * t_meet, -h};
  g.B_prime = {2.0 * v * t_meet, h};
  g.line_axis = 1;
  g.line_value = 0.0;
  g.u = u;
  g.v = v;
  g.r_I = 3.0 * p.sigma;

  std::vector<Particle> particles{{"P", p.mass, 2, true}};
  spec.initial.push_back({{g.S.x, g.S.y}, {v, 0.0}, p.sigma, SpinLabel::up_x});
  if (kind == ScenarioKind::exp3 || kind == ScenarioKind::exp4) {
    particles.push_back({"M", p.mass, 0, true});
    spec.initial.push_back({{}, {}, 1.0, SpinLabel::up_x});
  }
  if (kind != ScenarioKind::exp1) {
    particles.push_back({"F", p.mass, 1, false});
    spec.initial.push_back({{0.0}, {0.0}, p.pointer_sigma, std::nullopt});
  }
  spec.registry = ParticleRegistry(std::move(particles));

  spec.events.push_back({t0, SplitterParams{"P", {0.0, h}, {v, -u}, {0.0, -h}, {v, u}}});

  const double shift = p.pointer_separation * p.pointer_sigma;
  if (kind == ScenarioKind::exp2) {
    const double tc = p.conversion_time.value_or(0.25 * t_meet);
    require(tc >= t0 && tc <= t1, "conversion_time", "must lie in [t0, t1]");
    spec.options.conversion_time = tc;
    spec.events.push_back({tc, PointerConversionParams{"P", "F", shift, p.pointer_duration}});
  }
  if (kind == ScenarioKind::exp3 || kind == ScenarioKind::exp4) {
    require(p.coupling_time > t0 && p.coupling_time < t_meet, "coupling_time",
            "must lie in (t0, t_I)");
    spec.events.push_back(
        {p.coupling_time, PathSpinCouplingParams{"P", 1, 0.0, true, "M", 3.0}});

    const double requested = p.conversion_time.value_or(t_meet + 0.5625 * t_meet);
    require(requested >= t0 && requested <= t1, "conversion_time", "must lie in [t0, t1]");
    double tc = requested;
    if (p.frame_order == FrameOrder::swapped) {
      tc = 2.0 * t_meet - requested;
      require(tc >= t0 && tc <= t1, "conversion_time",
              "swapped ordering falls outside [t0, t1]");
    }
    spec.options.conversion_time = requested;
    spec.options.frame_order = p.frame_order;
    spec.events.push_back({tc, PointerConversionParams{"M", "F", shift, p.pointer_duration}});

    if (kind == ScenarioKind::exp4) {
      spec.options.interfere = p.interfere;
      if (!p.interfere) {
        require(p.deflect_time > t0 && p.deflect_time < t_meet, "deflect_time",
                "must lie in (t0, t_I)");
        require(p.deflect_speed * (t_meet - p.deflect_time) > 8.0 * p.sigma, "deflect_speed",
                "must separate the packets by more than 8 sigma at I");
        spec.events.push_back({p.deflect_time,
                               DeflectParams{"P", SpinSelector{"P", SpinLabel::down_x},
                                             {p.deflect_speed, 0.0}}});
      }
    }
  }
  std::stable_sort(spec.events.begin(), spec.events.end(),
                   [](const UnitaryEvent& a, const UnitaryEvent& b) { return a.time < b.time; });
  validate(spec);
  return spec;
}

void validate(const ScenarioSpec& spec) {
  require(spec.hbar > 0.0, "hbar", "must be > 0");
  require(spec.t1 > spec.t0, "t1", "must exceed t0");
  require(spec.dt > 0.0 && spec.dt <= spec.t1 - spec.t0, "dt", "must be in (0, t1 - t0]");
  require(spec.sampling.n >= 1, "n", "must be >= 1");
  require(spec.classify.proximity_sigmas > 0.0, "proximity_sigmas", "must be > 0");
  require(spec.classify.crossing_band >= 0.0, "crossing_band", "must be >= 0");

  const auto& reg = spec.registry;
  if (spec.initial.size() != reg.size())
    throw ScenarioError(Kind::inconsistent, "one initial state per particle required", "initial");
  for (std::size_t i = 0; i < reg.size(); ++i) {
    const Particle& p = reg.particles()[i];
    const InitialState& s = spec.initial[i];
    const auto n = static_cast<std::size_t>(p.n_coords);
    if (s.center.size() != n || s.velocity.size() != n)
      throw ScenarioError(Kind::inconsistent,
                          "particle '" + p.id + "' center/velocity need " + std::to_string(n) +
                              " entries",
                          p.id);
    if (n > 0) require(s.sigma > 0.0, "sigma", "particle '" + p.id + "' sigma must be > 0");
    if (p.has_spin != s.spin.has_value())
      throw ScenarioError(Kind::inconsistent,
                          "particle '" + p.id + "' spin label must be given iff it has spin",
                          p.id);
  }

  const auto& g = spec.geometry;
  const auto tp = reg.find(g.particle);
  if (!tp || reg.particles()[*tp].n_coords != 2 || !reg.particles()[*tp].has_spin)
    throw ScenarioError(Kind::inconsistent,
                        "geometry particle '" + g.particle + "' must have 2 coordinates and spin",
                        "particle");
  require(g.line_axis == 0 || g.line_axis == 1, "line_axis", "must be 0 or 1");
  require(g.u > 0.0, "u", "must be > 0");
  require(g.v >= 0.0, "v", "must be >= 0");
  require(g.r_I > 0.0, "r_I", "must be > 0");

  const double tol = 1e-9 * scale_of(g);
  auto on_line = [&](Point2 p, const char* name) {
    if (std::abs(g.offset(p)) > tol)
      throw ScenarioError(Kind::symmetry_violation,
                          std::string(name) + " " + show(p) + " does not lie on L", name);
  };
  auto mirrored = [&](Point2 a, Point2 b, const char* na, const char* nb) {
    const Point2 m = g.mirror(a);
    if (std::abs(m.x - b.x) > tol || std::abs(m.y - b.y) > tol)
      throw ScenarioError(Kind::symmetry_violation,
                          std::string(na) + " " + show(a) + " and " + nb + " " + show(b) +
                              " are not mirror images across L",
                          std::string(na) + "," + nb);
  };
  on_line(g.S, "S");
  on_line(g.I, "I");
  mirrored(g.A, g.B, "A", "B");
  mirrored(g.A_prime, g.B_prime, "A'", "B'");

  if (spec.options.conversion_time)
    require(*spec.options.conversion_time >= spec.t0 && *spec.options.conversion_time <= spec.t1,
            "conversion_time", "must lie in [t0, t1]");

  std::optional<double> first_split;
  for (std::size_t i = 0; i < spec.events.size(); ++i) {
    const UnitaryEvent& e = spec.events[i];
    if (e.time < spec.t0 || e.time > spec.t1)
      throw ScenarioError(Kind::out_of_range,
                          "event " + std::to_string(i) + " time outside [t0, t1]", "events");
    if (i && e.time < spec.events[i - 1].time)
      throw ScenarioError(Kind::schedule_order,
                          "event " + std::to_string(i) + " (" + to_string(e.kind()) +
                              ") is scheduled before the preceding event",
                          "events");
    if (e.kind() == EventKind::splitter && !first_split) first_split = e.time;
  }

  auto check_particle = [&](const std::string& id, std::size_t i) {
    if (!reg.find(id))
      throw ScenarioError(Kind::inconsistent,
                          "event " + std::to_string(i) + " references unknown particle '" + id +
                              "'",
                          "events");
  };
  for (std::size_t i = 0; i < spec.events.size(); ++i) {
    const UnitaryEvent& e = spec.events[i];
    if (e.kind() != EventKind::splitter && first_split && e.time < *first_split)
      throw ScenarioError(Kind::schedule_order,
                          "event " + std::to_string(i) + " (" + to_string(e.kind()) +
                              ") occurs before the splitter",
                          "events");
    if (const auto* c = std::get_if<PathSpinCouplingParams>(&e.params)) {
      check_particle(c->path_particle, i);
      check_particle(c->record_particle, i);
    } else if (const auto* pc = std::get_if<PointerConversionParams>(&e.params)) {
      check_particle(pc->source, i);
      check_particle(pc->pointer, i);
      require(pc->duration > 0.0, "duration", "must be > 0");
      // A conversion must read a record that has already been written.
      for (std::size_t j = i + 1; j < spec.events.size(); ++j) {
        const auto* later = std::get_if<PathSpinCouplingParams>(&spec.events[j].params);
        if (later && later->record_particle == pc->source)
          throw ScenarioError(Kind::schedule_order,
                              "conversion of '" + pc->source + "' at t=" +
                                  std::to_string(e.time) +
                                  " precedes the coupling that writes it",
                              "events");
      }
    } else if (const auto* sp = std::get_if<SplitterParams>(&e.params)) {
      check_particle(sp->particle, i);
    } else if (const auto* d = std::get_if<DeflectParams>(&e.params)) {
      check_particle(d->particle, i);
      if (d->when) check_particle(d->when->particle, i);
    }
  }
}

WaveFunction initial_wave_function(const ScenarioSpec& spec) {
  const auto& reg = spec.registry;
  Branch b;
  for (std::size_t i = 0; i < reg.size(); ++i) {
    const InitialState& s = spec.initial[i];
    for (std::size_t c = 0; c < s.center.size(); ++c)
      b.packets.push_back({s.center[c], s.velocity[c], s.sigma, spec.t0, 0.0});
    if (s.spin) b.spins.push_back(*s.spin);
  }
  return WaveFunction(reg, {std::move(b)}, spec.hbar);
}

double interference_time(const ScenarioSpec& spec) {
  double t_split = spec.t0;
  for (const auto& e : spec.events)
    if (e.kind() == EventKind::splitter) {
      t_split = e.time;
      break;
    }
  return t_split + std::abs(spec.geometry.offset(spec.geometry.A)) / spec.geometry.u;
}

LineSpec line_of(const ScenarioSpec& spec) {
  const auto& g = spec.geometry;
  return {spec.registry.coord_offset(g.particle) + static_cast<std::size_t>(g.line_axis),
          g.line_value};
}

ScenarioSpec with_conversion_time(ScenarioSpec spec, double tc) {
  for (auto& e : spec.events)
    if (e.kind() == EventKind::spin_pointer_conversion) e.time = tc;
  std::stable_sort(spec.events.begin(), spec.events.end(),
                   [](const UnitaryEvent& a, const UnitaryEvent& b) { return a.time < b.time; });
  spec.options.conversion_time = tc;
  spec.options.frame_order = FrameOrder::normal;
  validate(spec);
  return spec;
}

std::optional<double> conversion_time_of(const ScenarioSpec& spec) {
  for (const auto& e : spec.events)
    if (e.kind() == EventKind::spin_pointer_conversion) return e.time;
  return std::nullopt;
}

}  // namespace bohm
