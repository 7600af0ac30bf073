// End-to-end acceptance checks. Prints one [PASS]/[FAIL] line per criterion
// and exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "bohm/compiled.hpp"
#include "bohm/ensemble.hpp"
#include "bohm/guidance.hpp"
#include "bohm/integrator.hpp"
#include "bohm/packet.hpp"
#include "bohm/sampling.hpp"
#include "bohm/stats.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace bohm;
using nlohmann::json;

namespace {

// Pinned tolerances.
constexpr double kFluxRatio = 1e-8;
constexpr double kOverlapFidelity = 0.99;
constexpr double kDominantFraction = 0.999;
constexpr double kSignalingDelta = 0.02;
constexpr double kSignalingSigmas = 4.0;
constexpr double kSignalingSeconds = 600.0;
constexpr double kEquivarianceP = 0.01;
constexpr double kBiasedP = 1e-4;
constexpr double kSeparation = 1e-8;  // x sigma0
constexpr double kCnError = 1e-4;
constexpr double kGradientError = 1e-6;
constexpr double kNormDrift = 1e-9;
constexpr double kDtHalving = 1e-4;  // x sigma0

#ifndef BOHMSIM_EXE
#define BOHMSIM_EXE "bohmsim"
#endif

const ScenarioKind kAll[] = {ScenarioKind::exp1, ScenarioKind::exp2, ScenarioKind::exp3,
                             ScenarioKind::exp4};

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  if (!pass) ++g_failures;
  std::cout << (pass ? "[PASS] " : "[FAIL] ") << id << ". " << name << ": " << detail
            << std::endl;
}

std::string str(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::current_path() / "acceptance-out";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

struct CliRun {
  int exit_code = -1;
  json summary;
  double seconds = 0.0;
};

/// Runs bohmsim with --out <dir> and reads back summary.json.
CliRun cli(const std::string& args, const std::string& dir_name, const std::string& env = "") {
  const fs::path dir = work_dir() / dir_name;
  fs::remove_all(dir);
  const std::string cmd = (env.empty() ? "" : env + " ") + "'" + BOHMSIM_EXE + "' " + args +
                          " --out '" + dir.string() + "' > '" + dir.string() + ".log' 2>&1";
  CliRun r;
  const auto start = std::chrono::steady_clock::now();
  const int status = std::system(cmd.c_str());
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream f(dir / "summary.json");
  if (f) r.summary = json::parse(f, nullptr, false);
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::size_t get(const json& j, const char* key) {
  return j.contains(key) ? j[key].get<std::size_t>() : static_cast<std::size_t>(-1);
}

/// 20 starting points: a 5 x 2 grid in each of the two post-split packets.
std::vector<Configuration> start_grid(const CompiledScenario& c) {
  const WaveFunction& wf = c.timeline.state_at(c.spec.t0);
  std::vector<Configuration> out;
  for (std::size_t b = 0; b < 2; ++b) {
    const auto st = branch_states(wf, b, c.spec.t0);
    for (double dx : {-1.0, -0.5, 0.0, 0.5, 1.0})
      for (double dy : {-0.6, 0.45}) {
        Configuration q(st.size());
        for (std::size_t i = 0; i < q.size(); ++i) q[i] = st[i].center();
        q[c.longitudinal_coord] += dx * c.sigma0;
        q[c.transverse_coord] += (dy + 0.01 * dx) * c.sigma0;
        out.push_back(std::move(q));
      }
  }
  return out;
}

CompiledScenario compiled(ScenarioKind k, bool interfere = true) {
  BuiltinParams p;
  p.interfere = interfere;
  return compile(builtin_scenario(k, p));
}

// 1
void exp1_bounce() {
  const CliRun r = cli("run EXP1 --n 1000 --seed 42", "c1");
  if (r.summary.is_null()) return report(1, "EXP1 bounce", false, "no summary");
  const json& rel = r.summary["results"]["reliability"];
  const std::size_t aborted = r.summary["results"]["aborted"]["count"];
  const std::size_t classified = get(rel, "classified");
  const std::size_t bounced = get(rel, "bounced");
  const std::size_t c0 = rel["L_crossings"]["0"];
  const bool pass = r.exit_code == 0 && aborted == 0 && c0 == 1000 && bounced == classified;
  report(1, "EXP1 bounce", pass,
         "L_crossings=0 for " + std::to_string(c0) + "/1000, bounced " +
             std::to_string(bounced) + "/" + std::to_string(classified) +
             " classified, unclassified " + std::to_string(get(rel, "unclassified")) +
             ", aborted " + std::to_string(aborted));
}

// 2
void zero_flux() {
  const CompiledScenario c = compiled(ScenarioKind::exp1);
  const LineSpec line = line_of(c.spec);
  double worst = 0.0;
  for (double t : time_grid(c.spec.t0, c.spec.t1, 200)) {
    const FluxProfile f = current_across_line(c.timeline.state_at(t), line, t, 401);
    worst = std::max(worst, f.max_abs_current() / f.peak_current_scale);
  }
  report(2, "zero flux across L", worst < kFluxRatio,
         "max |j_n| / peak scale = " + str(worst) + " over 200 times (limit " + str(kFluxRatio) +
             ")");
}

// 3
void overlap_spin() {
  const CompiledScenario c = compiled(ScenarioKind::exp1);
  const double f = verify_overlap_spin(c, c.interference_time);
  report(3, "overlap spin reconstruction", f > kOverlapFidelity,
         "z-up fidelity at t_I = " + str(f) + " (limit " + str(kOverlapFidelity) + ")");
}

// 4
void exp2_reliability() {
  const CliRun r = cli("run EXP2 --n 1000 --seed 42", "c4");
  if (r.summary.is_null()) return report(4, "EXP2 reliability", false, "no summary");
  const json& rel = r.summary["results"]["reliability"];
  const std::size_t aborted = r.summary["results"]["aborted"]["count"];
  const std::size_t classified = get(rel, "classified");
  const std::size_t flagged = get(rel, "flagged");
  const std::size_t matches = get(rel, "flag_matches_endpoint");
  const std::size_t c1 = rel["L_crossings"]["1"];
  const bool pass = r.exit_code == 0 && aborted == 0 && flagged == classified &&
                    matches == classified && c1 == 1000;
  report(4, "EXP2 reliability", pass,
         "flag<->endpoint " + std::to_string(matches) + "/" + std::to_string(classified) +
             " classified, one L crossing " + std::to_string(c1) + "/1000, unclassified " +
             std::to_string(get(rel, "unclassified")));
}

// 5 and 6 share the EXP3 run.
void exp3_late_and_record() {
  const CliRun r = cli("run EXP3 --n 1000 --seed 42", "c5");
  if (r.summary.is_null()) {
    report(5, "EXP3 late conversion", false, "no summary");
    report(6, "record at make time", false, "no summary");
    return;
  }
  const json& rel = r.summary["results"]["reliability"];
  const std::size_t aborted = r.summary["results"]["aborted"]["count"];
  const std::size_t completed = 1000 - aborted;
  const std::size_t classified = get(rel, "classified");
  const std::size_t flagged = get(rel, "flagged");
  const std::size_t with_endpoint = get(rel, "flag_matches_endpoint");
  const std::size_t with_path = get(rel, "flag_matches_path");
  report(5, "EXP3 late conversion",
         r.exit_code == 0 && flagged == classified && with_endpoint == flagged && with_path == 0,
         "flag matches endpoint " + std::to_string(with_endpoint) + "/" +
             std::to_string(flagged) + ", matches traveled path " + std::to_string(with_path) +
             "/" + std::to_string(flagged));

  const std::size_t checked = get(rel, "record_checked");
  const std::size_t dominant = get(rel, "record_dominant");
  const std::size_t predicts = get(rel, "record_predicts_flag");
  const double frac = checked ? double(dominant) / double(completed) : 0.0;
  report(6, "record at make time",
         r.exit_code == 0 && checked == completed && frac >= kDominantFraction &&
             predicts == dominant,
         "dominant weight > 0.99 for " + std::to_string(dominant) + "/" +
             std::to_string(completed) + ", predicts flag " + std::to_string(predicts) + "/" +
             std::to_string(dominant));
}

// 7
void flip_test() {
  const CliRun a = cli("flip-test EXP4 --n 500 --seed 42", "c7a");
  const CliRun b = cli("flip-test EXP4 --n 500 --seed 42 --interfere false", "c7b");
  if (a.summary.is_null() || b.summary.is_null())
    return report(7, "delayed-choice flip", false, "no summary");
  const double fa = a.summary["flip_fraction"];
  const double fb = b.summary["flip_fraction"];
  report(7, "delayed-choice flip",
         a.exit_code == 0 && b.exit_code == 0 && fa == 1.0 && fb == 0.0,
         "flip fraction " + str(fa) + " with interference, " + str(fb) + " without");
}

// 8
void no_signaling() {
  const CliRun r = cli("compare-signaling EXP4 --n 10000 --seed 42", "c8");
  if (r.summary.is_null()) return report(8, "no-signaling", false, "no summary");
  const json& cmp = r.summary["comparison"];
  const double pa = cmp["p_yes_interfere"], pb = cmp["p_yes_blocked"], d = cmp["delta"];
  const double band = kSignalingSigmas * std::sqrt(0.25 / 10000.0);
  const bool pass = r.exit_code == 0 && d < kSignalingDelta && std::abs(pa - 0.5) < band &&
                    std::abs(pb - 0.5) < band && r.seconds <= kSignalingSeconds;
  report(8, "no-signaling", pass,
         "p(YES) " + str(pa) + " vs " + str(pb) + ", |delta| " + str(d) + ", runtime " +
             str(std::round(r.seconds)) + " s");
}

// 9
void equivariance() {
  std::string detail;
  bool pass = true;
  double min_p = 1.0;
  for (auto k : kAll) {
    const CompiledScenario c = compiled(k);
    EnsembleOptions opts;
    opts.checkpoints = {0.5 * c.interference_time, c.interference_time, c.spec.t1};
    const EnsembleReport rep = run_ensemble(c, SamplingPlan{10000, 42, false}, opts);
    if (rep.equivariance.size() != 3) pass = false;
    for (const auto& s : rep.equivariance) {
      min_p = std::min(min_p, s.p_value);
      if (!(s.p_value > kEquivarianceP)) pass = false;
    }
    detail += std::string(to_string(k)) + " p=";
    for (const auto& s : rep.equivariance) detail += str(s.p_value) + " ";
  }
  // Power: a sampler with 1.5x too wide packets must be rejected.
  const CompiledScenario c = compiled(ScenarioKind::exp1);
  const WaveFunction& wf = c.timeline.state_at(c.spec.t0);
  std::vector<Branch> wide = wf.branches();
  for (auto& b : wide)
    for (auto& p : b.packets) p.width0 *= 1.5;
  const WaveFunction biased(wf.registry(), wide, wf.hbar());
  std::vector<double> pos;
  for (const auto& q : sample_initial(biased, c.spec.t0, SamplingPlan{10000, 42, false}))
    pos.push_back(q[c.transverse_coord]);
  const double p_biased =
      equivariance_check(pos, wf, c.spec.t0, c.transverse_coord).p_value;
  pass = pass && p_biased < kBiasedP;
  report(9, "equivariance", pass,
         detail + "(min " + str(min_p) + "), biased sampler p=" + str(p_biased));
}

// 10
void non_crossing() {
  bool pass = true;
  std::string detail;
  for (auto k : kAll) {
    const CompiledScenario c = compiled(k);
    std::vector<Trajectory> trajs;
    IntegratorOptions opts;
    opts.dt = c.spec.dt;
    for (const auto& q0 : start_grid(c))
      trajs.push_back(integrate_trajectory(c.timeline, q0, c.spec.t0, c.spec.t1, opts));
    const double sep = min_pairwise_separation(trajs) / c.sigma0;
    if (!(sep > kSeparation)) pass = false;
    detail += std::string(to_string(k)) + " " + str(sep) + " ";
  }
  report(10, "non-crossing", pass, "min separation / sigma0: " + detail);
}

// 11
void numerics() {
  // Analytic packets against Crank-Nicolson.
  double cn_err = 0.0;
  {
    const GaussianPacket p{0.0, 1.0, 2.5, 0.0, 0.0};
    const double t = 3.2, lo = -40.0, hi = 45.0;
    const std::size_t n = 8501, steps = 3200;
    const PacketState start(p, 1.0, 1.0, 0.0);
    oracle::Grid1D g{lo, (hi - lo) / double(n - 1), {}};
    for (std::size_t i = 0; i < n; ++i) g.psi.push_back(start.value(g.x(i)));
    oracle::crank_nicolson(g, 1.0, 1.0, t, steps);
    const PacketState end(p, 1.0, 1.0, t);
    cn_err = oracle::l2_distance(g, [&](double x) { return end.value(x); });
  }

  // Analytic gradient against central differences, and norm along every timeline.
  double grad_err = 0.0, drift = 0.0, halving = 0.0;
  for (auto k : kAll) {
    const CompiledScenario c = compiled(k);
    for (double t : time_grid(c.spec.t0, c.spec.t1, 17)) {
      const WaveFunction& wf = c.timeline.state_at(t);
      drift = std::max(drift, std::abs(norm(wf, t) - 1.0));
      const auto st = branch_states(wf, 0, t);
      Configuration q(st.size());
      for (std::size_t i = 0; i < q.size(); ++i) q[i] = st[i].center() + 0.3 * st[i].sigma();
      const auto g = gradient_at(wf, q, t);
      const double h = 1e-5;
      for (std::size_t i = 0; i < q.size(); ++i) {
        Configuration qp = q, qm = q;
        qp[i] += h;
        qm[i] -= h;
        const auto fp = spinor_components_at(wf, qp, t);
        const auto fm = spinor_components_at(wf, qm, t);
        for (std::size_t s = 0; s < g.size(); ++s) {
          const cplx fd = (fp[s].value - fm[s].value) / (2.0 * h);
          double scale = 0.0;
          for (const auto& gi : g[s].grad) scale = std::max(scale, std::abs(gi));
          if (scale > 0.0) grad_err = std::max(grad_err, std::abs(fd - g[s].grad[i]) / scale);
        }
      }
    }
    for (const auto& q0 : start_grid(c)) {
      IntegratorOptions a, b;
      a.dt = c.spec.dt;
      b.dt = 0.5 * c.spec.dt;
      a.record_times = b.record_times = {c.spec.t1};
      const auto qa = integrate_trajectory(c.timeline, q0, c.spec.t0, c.spec.t1, a).samples.back().q;
      const auto qb = integrate_trajectory(c.timeline, q0, c.spec.t0, c.spec.t1, b).samples.back().q;
      for (std::size_t i = 0; i < qa.size(); ++i)
        halving = std::max(halving, std::abs(qa[i] - qb[i]) / c.sigma0);
    }
  }
  const bool pass = cn_err < kCnError && grad_err < kGradientError && drift < kNormDrift &&
                    halving < kDtHalving;
  report(11, "numerics", pass,
         "CN L2 " + str(cn_err) + ", gradient rel " + str(grad_err) + ", norm drift " +
             str(drift) + ", dt-halving shift / sigma0 " + str(halving));
}

// 12
void determinism() {
  bool pass = true;
  std::string detail;
  for (auto k : kAll) {
    const std::string name = to_string(k);
    std::string csv, summary;
    for (int w : {1, 4, 8, 4}) {
      const std::string dir = "c12-" + name + "-" + std::to_string(w);
      const CliRun r = cli("run " + name + " --n 200 --seed 42", dir,
                           "BOHMSIM_WORKERS=" + std::to_string(w));
      const std::string c = slurp(work_dir() / dir / "trajectories.csv");
      const std::string s = slurp(work_dir() / dir / "summary.json");
      if (r.exit_code != 0 || c.empty() || s.empty()) pass = false;
      if (csv.empty()) {
        csv = c;
        summary = s;
      } else if (c != csv || s != summary) {
        pass = false;
        detail += name + " differs at " + std::to_string(w) + " workers; ";
      }
    }
  }
  report(12, "determinism", pass,
         detail.empty() ? "CSV and summary byte-identical for 1/4/8/4 workers, EXP1-EXP4"
                        : detail);
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<void()>> checks[] = {
      {"1", exp1_bounce},   {"2", zero_flux},       {"3", overlap_spin},
      {"4", exp2_reliability}, {"5-6", exp3_late_and_record}, {"7", flip_test},
      {"8", no_signaling},  {"9", equivariance},    {"10", non_crossing},
      {"11", numerics},     {"12", determinism},
  };
  for (const auto& [id, f] : checks) {
    try {
      f();
    } catch (const std::exception& e) {
      ++g_failures;
      std::cout << "[FAIL] " << id << ". exception: " << e.what() << std::endl;
    }
  }
  std::cout << (g_failures ? "acceptance: FAILED (" + std::to_string(g_failures) + ")"
                           : std::string("acceptance: all criteria passed"))
            << std::endl;
  return g_failures ? 1 : 0;
}
