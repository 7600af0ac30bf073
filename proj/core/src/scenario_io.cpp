#include "bohm/scenario_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "bohm/error.hpp"

namespace bohm {

namespace {

using Kind = ScenarioError::Kind;

struct Token {
  std::string_view text;
  std::size_t column = 0;  // 1-based
};

struct Entry {
  std::string_view value;
  std::size_t line = 0;
  std::size_t column = 0;
};

[[noreturn]] void fail(Kind k, const std::string& msg, std::string field, std::size_t line,
                       std::size_t col) {
  throw ScenarioError(k, msg, std::move(field), line, col);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t b = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > b) out.push_back({line.substr(b, i - b), b + 1});
  }
  return out;
}

double to_number(std::string_view s, const std::string& field, std::size_t line,
                 std::size_t col) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    fail(Kind::syntax, "expected a number for '" + field + "', got '" + std::string(s) + "'",
         field, line, col);
  return v;
}

std::uint64_t to_unsigned(std::string_view s, const std::string& field, std::size_t line,
                          std::size_t col) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    fail(Kind::syntax,
         "expected a non-negative integer for '" + field + "', got '" + std::string(s) + "'",
         field, line, col);
  return v;
}

bool to_bool(std::string_view s, const std::string& field, std::size_t line, std::size_t col) {
  if (s == "true") return true;
  if (s == "false") return false;
  fail(Kind::syntax, "expected true or false for '" + field + "'", field, line, col);
}

std::vector<double> to_list(std::string_view s, const std::string& field, std::size_t line,
                            std::size_t col) {
  std::vector<double> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto comma = s.find(',', start);
    const auto part = s.substr(start, comma == std::string_view::npos ? s.npos : comma - start);
    out.push_back(to_number(part, field, line, col + start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

Point2 to_point(std::string_view s, const std::string& field, std::size_t line,
                std::size_t col) {
  const auto v = to_list(s, field, line, col);
  if (v.size() != 2) fail(Kind::syntax, "'" + field + "' needs two comma-separated numbers", field, line, col);
  return {v[0], v[1]};
}

/// key=value arguments of one particle or event line.
class Args {
 public:
  Args(const std::vector<Token>& toks, std::size_t first, std::size_t line, std::string owner)
      : line_(line), owner_(std::move(owner)) {
    for (std::size_t i = first; i < toks.size(); ++i) {
      const auto eq = toks[i].text.find('=');
      if (eq == std::string_view::npos || eq == 0)
        fail(Kind::syntax, "expected key=value, got '" + std::string(toks[i].text) + "'",
             owner_, line, toks[i].column);
      std::string key(toks[i].text.substr(0, eq));
      if (map_.count(key))
        fail(Kind::syntax, "duplicate key '" + key + "'", key, line, toks[i].column);
      map_[key] = {toks[i].text.substr(eq + 1), line, toks[i].column + eq + 1};
      cols_[key] = toks[i].column;
    }
  }

  std::optional<Entry> take(const std::string& key) {
    auto it = map_.find(key);
    if (it == map_.end()) return std::nullopt;
    Entry e = it->second;
    map_.erase(it);
    return e;
  }
  Entry need(const std::string& key) {
    auto e = take(key);
    if (!e) fail(Kind::syntax, owner_ + ": missing key '" + key + "'", key, line_, 1);
    return *e;
  }
  void finish() const {
    if (map_.empty()) return;
    const auto& [key, e] = *map_.begin();
    fail(Kind::unknown_key, owner_ + ": unknown key '" + key + "'", key, e.line, cols_.at(key));
  }

 private:
  std::size_t line_;
  std::string owner_;
  std::map<std::string, Entry> map_;
  std::map<std::string, std::size_t> cols_;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

std::string fmt_point(Point2 p) { return fmt(p.x) + "," + fmt(p.y); }

struct PendingSplitter {
  std::size_t event_index;
  std::size_t line;
  bool has_up_offset, has_up_velocity, has_down_offset, has_down_velocity;
};

UnitaryEvent parse_event(const std::vector<Token>& toks, std::size_t line,
                         std::vector<PendingSplitter>& pending, std::size_t index) {
  if (toks.size() < 2) fail(Kind::syntax, "event needs a time and a kind", "events", line, 1);
  UnitaryEvent e;
  e.time = to_number(toks[0].text, "time", line, toks[0].column);
  EventKind kind;
  try {
    kind = parse_event_kind(toks[1].text);
  } catch (const std::invalid_argument& ex) {
    fail(Kind::unknown_key, ex.what(), "events", line, toks[1].column);
  }
  Args a(toks, 2, line, to_string(kind));
  auto list = [&](const char* key) {
    const Entry en = a.need(key);
    return to_list(en.value, key, en.line, en.column);
  };
  auto number = [&](const char* key) {
    const Entry en = a.need(key);
    return to_number(en.value, key, en.line, en.column);
  };
  switch (kind) {
    case EventKind::splitter: {
      SplitterParams p;
      p.particle = std::string(a.need("particle").value);
      PendingSplitter ps{index, line, false, false, false, false};
      auto opt_list = [&](const char* key, std::vector<double>& dst, bool& flag) {
        if (auto en = a.take(key)) {
          dst = to_list(en->value, key, en->line, en->column);
          flag = true;
        }
      };
      opt_list("up_offset", p.up_offset, ps.has_up_offset);
      opt_list("up_velocity", p.up_velocity, ps.has_up_velocity);
      opt_list("down_offset", p.down_offset, ps.has_down_offset);
      opt_list("down_velocity", p.down_velocity, ps.has_down_velocity);
      pending.push_back(ps);
      e.params = std::move(p);
      break;
    }
    case EventKind::path_spin_coupling: {
      PathSpinCouplingParams p;
      p.path_particle = std::string(a.need("path").value);
      p.record_particle = std::string(a.need("record").value);
      const Entry ax = a.need("axis");
      p.axis = static_cast<int>(to_unsigned(ax.value, "axis", ax.line, ax.column));
      p.value = number("value");
      const Entry side = a.need("side");
      if (side.value != "below" && side.value != "above")
        fail(Kind::syntax, "side must be below or above", "side", side.line, side.column);
      p.below = side.value == "below";
      if (auto m = a.take("margin")) p.margin = to_number(m->value, "margin", m->line, m->column);
      e.params = std::move(p);
      break;
    }
    case EventKind::spin_pointer_conversion: {
      PointerConversionParams p;
      p.source = std::string(a.need("source").value);
      p.pointer = std::string(a.need("pointer").value);
      p.shift = number("shift");
      p.duration = number("duration");
      e.params = std::move(p);
      break;
    }
    case EventKind::deflect: {
      DeflectParams p;
      p.particle = std::string(a.need("particle").value);
      p.delta_v = list("delta_v");
      if (auto w = a.take("when")) {
        const auto colon = w->value.find(':');
        if (colon == std::string_view::npos)
          fail(Kind::syntax, "when expects particle:spin", "when", w->line, w->column);
        try {
          p.when = SpinSelector{std::string(w->value.substr(0, colon)),
                                parse_spin_label(w->value.substr(colon + 1))};
        } catch (const std::invalid_argument& ex) {
          fail(Kind::syntax, ex.what(), "when", w->line, w->column + colon + 1);
        }
      }
      e.params = std::move(p);
      break;
    }
  }
  a.finish();
  return e;
}

void derive_splitter(SplitterParams& sp, const PendingSplitter& ps, const ScenarioSpec& spec) {
  const auto& g = spec.geometry;
  const int t = g.line_axis;
  auto vec = [](Point2 p) { return std::vector<double>{p.x, p.y}; };
  auto velocity = [&](Point2 from) {
    std::vector<double> vel(2);
    vel[1 - t] = g.v;
    vel[t] = g.offset(from) > 0 ? -g.u : g.u;
    return vel;
  };
  const Point2 a{g.A.x - g.S.x, g.A.y - g.S.y};
  const Point2 b{g.B.x - g.S.x, g.B.y - g.S.y};
  if (!ps.has_up_offset) sp.up_offset = vec(a);
  if (!ps.has_up_velocity) sp.up_velocity = velocity(g.A);
  if (!ps.has_down_offset) sp.down_offset = vec(b);
  if (!ps.has_down_velocity) sp.down_velocity = velocity(g.B);
}

}  // namespace

ParseResult parse_scenario_file(std::string_view text) {
  ParseResult out;
  ScenarioSpec& spec = out.spec;

  enum class Section { none, particles, geometry, events, run };
  Section section = Section::none;
  std::map<std::string, Entry> geometry, run;
  std::vector<Particle> particles;
  std::vector<InitialState> initial;
  std::vector<PendingSplitter> pending;
  std::vector<bool> seen(4, false);

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const std::size_t indent = raw.find_first_not_of(" \t") + 1;

    if (line.front() == '[') {
      if (line.back() != ']')
        fail(Kind::syntax, "unterminated section header", "section", line_no, indent);
      const auto name = trim(line.substr(1, line.size() - 2));
      static const std::pair<const char*, Section> names[] = {{"particles", Section::particles},
                                                              {"geometry", Section::geometry},
                                                              {"events", Section::events},
                                                              {"run", Section::run}};
      section = Section::none;
      for (const auto& [n, s] : names)
        if (name == n) section = s;
      if (section == Section::none)
        fail(Kind::unknown_key, "unknown section [" + std::string(name) + "]", std::string(name),
             line_no, indent + 1);
      const auto idx = static_cast<std::size_t>(section) - 1;
      if (seen[idx])
        fail(Kind::syntax, "section [" + std::string(name) + "] appears twice", std::string(name),
             line_no, indent);
      seen[idx] = true;
      continue;
    }

    switch (section) {
      case Section::none:
        fail(Kind::syntax, "content before the first section header", "section", line_no, indent);
      case Section::geometry:
      case Section::run: {
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
          fail(Kind::syntax, "expected key = value", "", line_no, indent);
        const std::string key(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));
        const auto lead = line.substr(eq + 1).find_first_not_of(" \t");
        const std::size_t vcol = indent + eq + 1 + (lead == std::string_view::npos ? 0 : lead);
        auto& dst = section == Section::geometry ? geometry : run;
        if (key.empty()) fail(Kind::syntax, "missing key before '='", "", line_no, indent);
        if (dst.count(key)) fail(Kind::syntax, "duplicate key '" + key + "'", key, line_no, indent);
        dst[key] = {value, line_no, vcol};
        break;
      }
      case Section::particles: {
        const auto toks = tokenize(raw.substr(0, raw.find_last_not_of(" \t\r") + 1));
        const std::string id(toks[0].text);
        if (id.find('=') != std::string::npos)
          fail(Kind::syntax, "particle line must start with an id", "particles", line_no,
               toks[0].column);
        Args a(toks, 1, line_no, "particle " + id);
        Particle p{id, 1.0, 0, false};
        InitialState s;
        if (auto e = a.take("mass")) p.mass = to_number(e->value, "mass", e->line, e->column);
        if (auto e = a.take("coords")) {
          const auto n = to_unsigned(e->value, "coords", e->line, e->column);
          if (n > 3) fail(Kind::out_of_range, "coords must be 0..3", "coords", e->line, e->column);
          p.n_coords = static_cast<int>(n);
        }
        if (auto e = a.take("spin")) {
          try {
            s.spin = parse_spin_label(e->value);
          } catch (const std::invalid_argument& ex) {
            fail(Kind::syntax, ex.what(), "spin", e->line, e->column);
          }
          p.has_spin = true;
        }
        const auto n = static_cast<std::size_t>(p.n_coords);
        s.center.assign(n, 0.0);
        s.velocity.assign(n, 0.0);
        if (auto e = a.take("center")) s.center = to_list(e->value, "center", e->line, e->column);
        else if (n) out.defaulted.push_back("particles." + id + ".center");
        if (auto e = a.take("velocity"))
          s.velocity = to_list(e->value, "velocity", e->line, e->column);
        else if (n) out.defaulted.push_back("particles." + id + ".velocity");
        if (auto e = a.take("sigma")) s.sigma = to_number(e->value, "sigma", e->line, e->column);
        else if (n) out.defaulted.push_back("particles." + id + ".sigma");
        a.finish();
        if (p.mass <= 0.0)
          fail(Kind::out_of_range, "mass must be > 0", "mass", line_no, toks[0].column);
        if (std::any_of(particles.begin(), particles.end(),
                        [&](const Particle& q) { return q.id == id; }))
          fail(Kind::inconsistent, "duplicate particle id '" + id + "'", id, line_no,
               toks[0].column);
        particles.push_back(p);
        initial.push_back(std::move(s));
        break;
      }
      case Section::events: {
        const auto toks = tokenize(raw);
        spec.events.push_back(parse_event(toks, line_no, pending, spec.events.size()));
        break;
      }
    }
  }

  if (particles.empty())
    throw ScenarioError(Kind::inconsistent, "no particles declared", "particles");
  spec.registry = ParticleRegistry(particles);
  spec.initial = std::move(initial);

  // [geometry]
  auto take = [&](std::map<std::string, Entry>& m, const char* section_name, const char* key,
                  bool required) -> std::optional<Entry> {
    auto it = m.find(key);
    if (it == m.end()) {
      if (required)
        throw ScenarioError(Kind::syntax,
                            std::string("[") + section_name + "] missing key '" + key + "'", key);
      out.defaulted.push_back(std::string(section_name) + "." + key);
      return std::nullopt;
    }
    Entry e = it->second;
    m.erase(it);
    return e;
  };
  auto leftover = [](const std::map<std::string, Entry>& m, const char* section_name) {
    if (m.empty()) return;
    const auto& [key, e] = *m.begin();
    fail(Kind::unknown_key, std::string("[") + section_name + "] unknown key '" + key + "'", key,
         e.line, e.column);
  };
  auto& g = spec.geometry;
  if (auto e = take(geometry, "geometry", "particle", false)) g.particle = std::string(e->value);
  const std::pair<const char*, Point2*> points[] = {{"S", &g.S},  {"A", &g.A},
                                                    {"B", &g.B},  {"A'", &g.A_prime},
                                                    {"B'", &g.B_prime}, {"I", &g.I}};
  for (const auto& [key, dst] : points) {
    const Entry e = *take(geometry, "geometry", key, true);
    *dst = to_point(e.value, key, e.line, e.column);
  }
  if (auto e = take(geometry, "geometry", "line_axis", false))
    g.line_axis = static_cast<int>(to_unsigned(e->value, "line_axis", e->line, e->column));
  if (auto e = take(geometry, "geometry", "line_value", false))
    g.line_value = to_number(e->value, "line_value", e->line, e->column);
  {
    const Entry u = *take(geometry, "geometry", "u", true);
    g.u = to_number(u.value, "u", u.line, u.column);
    const Entry v = *take(geometry, "geometry", "v", true);
    g.v = to_number(v.value, "v", v.line, v.column);
  }
  if (auto e = take(geometry, "geometry", "r_I", false)) {
    g.r_I = to_number(e->value, "r_I", e->line, e->column);
  } else if (const auto idx = spec.registry.find(g.particle)) {
    g.r_I = 3.0 * spec.initial[*idx].sigma;
  }
  leftover(geometry, "geometry");

  // [run]
  auto num = [&](const char* key, double& dst, bool required) {
    if (auto e = take(run, "run", key, required)) dst = to_number(e->value, key, e->line, e->column);
  };
  if (auto e = take(run, "run", "name", false)) spec.name = std::string(e->value);
  num("hbar", spec.hbar, false);
  num("t0", spec.t0, false);
  num("t1", spec.t1, true);
  num("dt", spec.dt, false);
  if (auto e = take(run, "run", "n", false))
    spec.sampling.n = to_unsigned(e->value, "n", e->line, e->column);
  if (auto e = take(run, "run", "seed", false))
    spec.sampling.seed = to_unsigned(e->value, "seed", e->line, e->column);
  if (auto e = take(run, "run", "antithetic", false))
    spec.sampling.antithetic = to_bool(e->value, "antithetic", e->line, e->column);
  if (auto it = run.find("conversion_time"); it != run.end()) {
    spec.options.conversion_time =
        to_number(it->second.value, "conversion_time", it->second.line, it->second.column);
    run.erase(it);
  }
  if (auto e = take(run, "run", "interfere", false))
    spec.options.interfere = to_bool(e->value, "interfere", e->line, e->column);
  if (auto e = take(run, "run", "frame_order", false)) {
    try {
      spec.options.frame_order = parse_frame_order(e->value);
    } catch (const std::invalid_argument& ex) {
      fail(Kind::syntax, ex.what(), "frame_order", e->line, e->column);
    }
  }
  num("proximity_sigmas", spec.classify.proximity_sigmas, false);
  num("crossing_band", spec.classify.crossing_band, false);
  leftover(run, "run");

  for (const auto& ps : pending)
    derive_splitter(std::get<SplitterParams>(spec.events[ps.event_index].params), ps, spec);

  validate(spec);
  return out;
}

std::string render_scenario(const ScenarioSpec& spec) {
  std::ostringstream os;
  os << "[particles]\n";
  for (std::size_t i = 0; i < spec.registry.size(); ++i) {
    const Particle& p = spec.registry.particles()[i];
    const InitialState& s = spec.initial[i];
    os << p.id << " mass=" << fmt(p.mass) << " coords=" << p.n_coords;
    if (s.spin) os << " spin=" << to_string(*s.spin);
    if (p.n_coords > 0)
      os << " center=" << fmt_list(s.center) << " velocity=" << fmt_list(s.velocity);
    os << " sigma=" << fmt(s.sigma) << "\n";
  }

  const auto& g = spec.geometry;
  os << "\n[geometry]\n"
     << "particle = " << g.particle << "\n"
     << "S = " << fmt_point(g.S) << "\n"
     << "A = " << fmt_point(g.A) << "\n"
     << "B = " << fmt_point(g.B) << "\n"
     << "A' = " << fmt_point(g.A_prime) << "\n"
     << "B' = " << fmt_point(g.B_prime) << "\n"
     << "I = " << fmt_point(g.I) << "\n"
     << "line_axis = " << g.line_axis << "\n"
     << "line_value = " << fmt(g.line_value) << "\n"
     << "u = " << fmt(g.u) << "\n"
     << "v = " << fmt(g.v) << "\n"
     << "r_I = " << fmt(g.r_I) << "\n";

  os << "\n[events]\n";
  for (const auto& e : spec.events) {
    os << fmt(e.time) << " " << to_string(e.kind());
    if (const auto* p = std::get_if<SplitterParams>(&e.params)) {
      os << " particle=" << p->particle << " up_offset=" << fmt_list(p->up_offset)
         << " up_velocity=" << fmt_list(p->up_velocity)
         << " down_offset=" << fmt_list(p->down_offset)
         << " down_velocity=" << fmt_list(p->down_velocity);
    } else if (const auto* p = std::get_if<PathSpinCouplingParams>(&e.params)) {
      os << " path=" << p->path_particle << " axis=" << p->axis << " value=" << fmt(p->value)
         << " side=" << (p->below ? "below" : "above") << " record=" << p->record_particle
         << " margin=" << fmt(p->margin);
    } else if (const auto* p = std::get_if<PointerConversionParams>(&e.params)) {
      os << " source=" << p->source << " pointer=" << p->pointer << " shift=" << fmt(p->shift)
         << " duration=" << fmt(p->duration);
    } else if (const auto* p = std::get_if<DeflectParams>(&e.params)) {
      os << " particle=" << p->particle;
      if (p->when) os << " when=" << p->when->particle << ":" << to_string(p->when->label);
      os << " delta_v=" << fmt_list(p->delta_v);
    }
    os << "\n";
  }

  os << "\n[run]\n"
     << "name = " << spec.name << "\n"
     << "hbar = " << fmt(spec.hbar) << "\n"
     << "t0 = " << fmt(spec.t0) << "\n"
     << "t1 = " << fmt(spec.t1) << "\n"
     << "dt = " << fmt(spec.dt) << "\n"
     << "n = " << spec.sampling.n << "\n"
     << "seed = " << spec.sampling.seed << "\n"
     << "antithetic = " << (spec.sampling.antithetic ? "true" : "false") << "\n";
  if (spec.options.conversion_time)
    os << "conversion_time = " << fmt(*spec.options.conversion_time) << "\n";
  os << "interfere = " << (spec.options.interfere ? "true" : "false") << "\n"
     << "frame_order = " << to_string(spec.options.frame_order) << "\n"
     << "proximity_sigmas = " << fmt(spec.classify.proximity_sigmas) << "\n"
     << "crossing_band = " << fmt(spec.classify.crossing_band) << "\n";
  return os.str();
}

ParseResult load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario_file(ss.str());
}

}  // namespace bohm
