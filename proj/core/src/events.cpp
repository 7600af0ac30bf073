#include "bohm/events.hpp"

#include <cmath>
#include <numbers>

#include "bohm/error.hpp"

namespace bohm {

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::splitter: return "SPLITTER";
    case EventKind::path_spin_coupling: return "PATH_SPIN_COUPLING";
    case EventKind::spin_pointer_conversion: return "SPIN_POINTER_CONVERSION";
    case EventKind::deflect: return "DEFLECT";
  }
  return "UNKNOWN";
}

EventKind parse_event_kind(std::string_view text) {
  for (auto k : {EventKind::splitter, EventKind::path_spin_coupling,
                 EventKind::spin_pointer_conversion, EventKind::deflect})
    if (text == to_string(k)) return k;
  throw std::invalid_argument("unknown event kind '" + std::string(text) + "'");
}

namespace {

struct Resolved {
  std::size_t offset;
  int n_coords;
};

Resolved resolve(const ParticleRegistry& reg, const std::string& id, const char* role) {
  const auto idx = reg.find(id);
  if (!idx) throw EventError(std::string(role) + " particle '" + id + "' is not registered");
  return {reg.coord_offset(*idx), reg.particles()[*idx].n_coords};
}

std::size_t spin_slot_of(const ParticleRegistry& reg, const std::string& id, const char* role) {
  const auto idx = reg.find(id);
  if (!idx || !reg.particles()[*idx].has_spin)
    throw EventError(std::string(role) + " particle '" + id + "' carries no spin");
  return reg.spin_slot(id);
}

void check_len(const std::vector<double>& v, int n, const char* what) {
  if (static_cast<int>(v.size()) != n)
    throw EventError(std::string(what) + " needs one entry per particle coordinate");
}

Branch moved_copy(const Branch& src, const ParticleRegistry& reg, const Resolved& r,
                  const std::vector<double>& offset, const std::vector<double>& velocity,
                  double hbar, double t) {
  Branch out = src;
  for (int c = 0; c < r.n_coords; ++c) {
    const std::size_t i = r.offset + static_cast<std::size_t>(c);
    GaussianPacket p = translate(src.packets[i], offset[c]);
    out.packets[i] = kick(p, velocity[c] - p.velocity, reg.coord_mass(i), hbar, t);
  }
  return out;
}

std::vector<Branch> split(const WaveFunction& wf, const SplitterParams& sp, double t) {
  const auto& reg = wf.registry();
  const Resolved r = resolve(reg, sp.particle, "splitter");
  const std::size_t slot = spin_slot_of(reg, sp.particle, "splitter");
  check_len(sp.up_offset, r.n_coords, "splitter up_offset");
  check_len(sp.up_velocity, r.n_coords, "splitter up_velocity");
  check_len(sp.down_offset, r.n_coords, "splitter down_offset");
  check_len(sp.down_velocity, r.n_coords, "splitter down_velocity");

  std::vector<Branch> out;
  for (const Branch& b : wf.branches()) {
    Branch up = moved_copy(b, reg, r, sp.up_offset, sp.up_velocity, wf.hbar(), t);
    Branch down = moved_copy(b, reg, r, sp.down_offset, sp.down_velocity, wf.hbar(), t);
    up.amp = b.amp * (1.0 / std::numbers::sqrt2);
    down.amp = b.amp * (1.0 / std::numbers::sqrt2);
    up.spins[slot] = SpinLabel::up_x;
    down.spins[slot] = SpinLabel::down_x;
    out.push_back(std::move(up));
    out.push_back(std::move(down));
  }
  return out;
}

std::vector<Branch> couple(const WaveFunction& wf, const PathSpinCouplingParams& cp, double t) {
  const auto& reg = wf.registry();
  const Resolved r = resolve(reg, cp.path_particle, "path");
  if (cp.axis < 0 || cp.axis >= r.n_coords)
    throw EventError("path axis outside the path particle's coordinates");
  const std::size_t coord = r.offset + static_cast<std::size_t>(cp.axis);
  const std::size_t slot = spin_slot_of(reg, cp.record_particle, "record");

  std::vector<Branch> out = wf.branches();
  for (Branch& b : out) {
    const PacketState s(b.packets[coord], reg.coord_mass(coord), wf.hbar(), t);
    const double gap = s.center() - cp.value;
    if (std::abs(gap) < cp.margin * s.sigma())
      throw EventError("ambiguous path membership: packet center " +
                       std::to_string(s.center()) + " lies within " +
                       std::to_string(cp.margin) + " sigma of the path boundary");
    const bool on_path = cp.below ? gap < 0.0 : gap > 0.0;
    if (on_path)
      b.spins[slot] = b.spins[slot] == SpinLabel::up_x ? SpinLabel::down_x : SpinLabel::up_x;
  }
  return out;
}

std::vector<Branch> convert(const WaveFunction& wf, const PointerConversionParams& pc, double t) {
  const auto& reg = wf.registry();
  const std::size_t slot = spin_slot_of(reg, pc.source, "source");
  const Resolved r = resolve(reg, pc.pointer, "pointer");
  if (r.n_coords < 1) throw EventError("pointer particle needs a spatial coordinate");
  if (!(pc.duration > 0.0)) throw EventError("pointer conversion duration must be > 0");

  std::vector<Branch> out = wf.branches();
  for (Branch& b : out) {
    if (b.spins[slot] != SpinLabel::down_x) continue;
    b.packets[r.offset] =
        kick(b.packets[r.offset], pc.velocity(), reg.coord_mass(r.offset), wf.hbar(), t);
  }
  return out;
}

std::vector<Branch> deflect(const WaveFunction& wf, const DeflectParams& dp, double t) {
  const auto& reg = wf.registry();
  const Resolved r = resolve(reg, dp.particle, "deflect");
  check_len(dp.delta_v, r.n_coords, "deflect delta_v");
  std::optional<std::size_t> slot;
  if (dp.when) slot = spin_slot_of(reg, dp.when->particle, "selector");

  std::vector<Branch> out = wf.branches();
  for (Branch& b : out) {
    if (slot && b.spins[*slot] != dp.when->label) continue;
    for (int c = 0; c < r.n_coords; ++c) {
      const std::size_t i = r.offset + static_cast<std::size_t>(c);
      b.packets[i] = kick(b.packets[i], dp.delta_v[c], reg.coord_mass(i), wf.hbar(), t);
    }
  }
  return out;
}

}  // namespace

WaveFunction apply_event(const WaveFunction& wf, const UnitaryEvent& e) {
  const double t = e.time;
  std::vector<Branch> branches = std::visit(
      [&](const auto& p) -> std::vector<Branch> {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, SplitterParams>) return split(wf, p, t);
        else if constexpr (std::is_same_v<P, PathSpinCouplingParams>) return couple(wf, p, t);
        else if constexpr (std::is_same_v<P, PointerConversionParams>) return convert(wf, p, t);
        else return deflect(wf, p, t);
      },
      e.params);
  return WaveFunction(wf.registry(), std::move(branches), wf.hbar());
}

}  // namespace bohm
