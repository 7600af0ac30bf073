#include "bohm/wavefunction.hpp"

#include <cmath>
#include <stdexcept>

#include "bohm/error.hpp"

namespace bohm {

const char* to_string(SpinLabel s) { return s == SpinLabel::up_x ? "up_x" : "down_x"; }

SpinLabel parse_spin_label(std::string_view text) {
  if (text == "up_x" || text == "up") return SpinLabel::up_x;
  if (text == "down_x" || text == "down") return SpinLabel::down_x;
  throw std::invalid_argument("unknown spin label '" + std::string(text) + "'");
}

WaveFunction::WaveFunction(ParticleRegistry registry, std::vector<Branch> branches,
                           double hbar)
    : registry_(std::move(registry)), branches_(std::move(branches)), hbar_(hbar) {
  if (!(hbar_ > 0.0)) throw std::invalid_argument("hbar must be > 0");
  if (branches_.empty()) throw std::invalid_argument("wave function needs at least one branch");

  for (const Branch& b : branches_) {
    if (b.packets.size() != registry_.dimension())
      throw DimensionError("branch packet count does not match registry dimension");
    if (b.spins.size() != registry_.spin_count())
      throw DimensionError("branch spin count does not match registry spin carriers");
    if (!std::isfinite(b.amp.real()) || !std::isfinite(b.amp.imag()))
      throw std::invalid_argument("branch amplitude must be finite");
    for (const GaussianPacket& p : b.packets)
      if (!(p.width0 > 0.0)) throw std::invalid_argument("packet width0 must be > 0");
  }

  for (std::size_t i = 0; i < branches_.size(); ++i) {
    std::size_t g = 0;
    while (g < groups_.size() && groups_[g] != branches_[i].spins) ++g;
    if (g == groups_.size()) {
      groups_.push_back(branches_[i].spins);
      members_.emplace_back();
    }
    members_[g].push_back(i);
  }
  for (const auto& m : members_) incoherent_ = incoherent_ && m.size() == 1;
}

std::vector<PacketState> branch_states(const WaveFunction& wf, std::size_t branch, double t) {
  const auto& reg = wf.registry();
  const auto& packets = wf.branches()[branch].packets;
  std::vector<PacketState> out;
  out.reserve(packets.size());
  for (std::size_t i = 0; i < packets.size(); ++i)
    out.emplace_back(packets[i], reg.coord_mass(i), wf.hbar(), t);
  return out;
}

double branch_peak_density(const WaveFunction& wf, std::size_t branch, double t) {
  double log_peak = 0.0;
  for (const PacketState& s : branch_states(wf, branch, t)) log_peak += s.log_peak_density();
  return std::norm(wf.branches()[branch].amp) * std::exp(log_peak);
}

namespace {

void check_dimension(const WaveFunction& wf, std::span<const double> q) {
  if (q.size() != wf.dimension())
    throw DimensionError("configuration has " + std::to_string(q.size()) +
                         " coordinates, registry expects " +
                         std::to_string(wf.dimension()));
}

cplx branch_value(const WaveFunction& wf, std::size_t b, std::span<const double> q,
                  double t) {
  const Branch& br = wf.branches()[b];
  if (br.amp == cplx(0.0, 0.0)) return {};
  cplx log_v = std::log(br.amp);
  const auto& reg = wf.registry();
  for (std::size_t i = 0; i < br.packets.size(); ++i)
    log_v += PacketState(br.packets[i], reg.coord_mass(i), wf.hbar(), t).log_value(q[i]);
  return std::exp(log_v);
}

}  // namespace

std::vector<SpinComponent> spinor_components_at(const WaveFunction& wf,
                                                std::span<const double> q, double t) {
  check_dimension(wf, q);
  std::vector<SpinComponent> out;
  out.reserve(wf.spin_groups().size());
  for (std::size_t g = 0; g < wf.spin_groups().size(); ++g) {
    cplx sum{};
    for (std::size_t b : wf.group_members()[g]) sum += branch_value(wf, b, q, t);
    out.push_back({wf.spin_groups()[g], sum});
  }
  return out;
}

std::vector<SpinGradient> gradient_at(const WaveFunction& wf, std::span<const double> q,
                                      double t) {
  check_dimension(wf, q);
  const auto& reg = wf.registry();
  std::vector<SpinGradient> out;
  out.reserve(wf.spin_groups().size());
  for (std::size_t g = 0; g < wf.spin_groups().size(); ++g) {
    SpinGradient sg{wf.spin_groups()[g], {}, std::vector<cplx>(q.size())};
    for (std::size_t b : wf.group_members()[g]) {
      const Branch& br = wf.branches()[b];
      const cplx v = branch_value(wf, b, q, t);
      sg.value += v;
      for (std::size_t i = 0; i < q.size(); ++i)
        sg.grad[i] +=
            v * PacketState(br.packets[i], reg.coord_mass(i), wf.hbar(), t).dlog(q[i]);
    }
    out.push_back(std::move(sg));
  }
  return out;
}

double norm(const WaveFunction& wf, double t) {
  const auto& reg = wf.registry();
  const auto& br = wf.branches();
  double total = 0.0;
  for (const auto& members : wf.group_members()) {
    for (std::size_t a : members) {
      for (std::size_t b : members) {
        cplx term = std::conj(br[a].amp) * br[b].amp;
        for (std::size_t i = 0; i < reg.dimension() && term != cplx{}; ++i)
          term *= overlap(br[a].packets[i], br[b].packets[i], reg.coord_mass(i), wf.hbar(), t);
        total += term.real();
      }
    }
  }
  return total;
}

}  // namespace bohm
