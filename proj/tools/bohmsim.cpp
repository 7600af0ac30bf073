// bohmsim: run the built-in trajectory experiments or a scenario file and
// write trajectories.csv / summary.json / manifest.json.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bohm/compiled.hpp"
#include "bohm/ensemble.hpp"
#include "bohm/error.hpp"
#include "bohm/output.hpp"
#include "bohm/scenario.hpp"
#include "bohm/scenario_io.hpp"
#include "bohm/version.hpp"

namespace fs = std::filesystem;
using namespace bohm;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitAborted = 2;

/// Flags shared by the scenario-taking subcommands.
struct Knobs {
  std::string scenario;
  std::optional<std::size_t> n;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> conversion_time;
  std::optional<std::string> interfere;
  std::optional<std::string> frame_order;
  unsigned workers = 0;
  std::string out;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void add_knobs(CLI::App* cmd, Knobs& k, bool scenario_required = true) {
  auto* pos = cmd->add_option("scenario", k.scenario, "EXP1..EXP4 or a scenario file");
  if (scenario_required) pos->required();
  cmd->add_option("--n", k.n, "number of trajectories")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", k.seed, "master seed");
  cmd->add_option("--dt", k.dt, "integration step")->check(CLI::PositiveNumber);
  cmd->add_option("--conversion-time", k.conversion_time, "spin-to-pointer conversion time");
  cmd->add_option("--interfere", k.interfere, "EXP4: let the packets interfere at I")
      ->check(CLI::IsMember({"true", "false"}));
  cmd->add_option("--frame-order", k.frame_order, "EXP3/EXP4: event ordering")
      ->check(CLI::IsMember({"normal", "swapped"}));
  cmd->add_option("--workers", k.workers, "worker threads (default: $BOHMSIM_WORKERS or all)");
  cmd->add_option("--out", k.out, "output directory (default: summary to stdout)");
}

struct Resolved {
  ScenarioSpec spec;
  std::string source;  // built-in name or file path
  std::vector<std::string> defaulted;
};

Resolved resolve(const Knobs& k) {
  Resolved r;
  r.source = k.scenario;
  if (const auto kind = parse_scenario_kind(k.scenario)) {
    BuiltinParams p;
    if (k.n) p.n = *k.n;
    if (k.seed) p.seed = *k.seed;
    if (k.dt) p.dt = *k.dt;
    if (k.conversion_time) {
      if (*kind == ScenarioKind::exp1)
        throw UsageError("--conversion-time does not apply to EXP1");
      p.conversion_time = k.conversion_time;
    }
    if (k.interfere) {
      if (*kind != ScenarioKind::exp4) throw UsageError("--interfere applies to EXP4 only");
      p.interfere = *k.interfere == "true";
    }
    if (k.frame_order) {
      if (*kind != ScenarioKind::exp3 && *kind != ScenarioKind::exp4)
        throw UsageError("--frame-order applies to EXP3 and EXP4 only");
      p.frame_order = parse_frame_order(*k.frame_order);
    }
    r.spec = builtin_scenario(*kind, p);
    return r;
  }
  if (!fs::is_regular_file(k.scenario))
    throw UsageError("unknown scenario '" + k.scenario + "' (expected EXP1..EXP4 or a file)");
  if (k.interfere || k.frame_order)
    throw UsageError("--interfere and --frame-order apply to built-in scenarios only");
  ParseResult parsed = load_scenario_file(k.scenario);
  r.spec = std::move(parsed.spec);
  r.defaulted = std::move(parsed.defaulted);
  if (k.n) r.spec.sampling.n = *k.n;
  if (k.seed) r.spec.sampling.seed = *k.seed;
  if (k.dt) r.spec.dt = *k.dt;
  if (k.conversion_time) r.spec = with_conversion_time(r.spec, *k.conversion_time);
  validate(r.spec);
  return r;
}

std::vector<double> default_checkpoints(const CompiledScenario& c) {
  const double t_I = c.interference_time;
  std::vector<double> cp{c.spec.t0 + 0.5 * (t_I - c.spec.t0), t_I, c.spec.t1};
  std::erase_if(cp, [&](double t) { return t < c.spec.t0 || t > c.spec.t1; });
  return cp;
}

void print_report_brief(const EnsembleReport& r, std::ostream& os) {
  const auto& rel = r.reliability;
  os << r.scenario << ": n=" << r.plan.n << " seed=" << r.plan.seed << " aborted=" << r.aborted
     << " classified=" << rel.classified << " B'=" << rel.endpoint_B
     << " flagged=" << rel.flagged << " yes=" << rel.yes << "\n";
  for (const auto& k : r.counts)
    os << "  " << to_string(k.initial_side) << " -> " << to_string(k.endpoint) << " flag "
       << to_string(k.flag) << ": " << k.count << "\n";
  for (const auto& e : r.equivariance)
    os << "  equivariance t=" << e.t << " chi2=" << e.chi2 << " p=" << e.p_value << "\n";
}

/// Writes summary (and manifest) into out, or the summary to stdout.
void emit(const std::string& out_dir, Json summary, const std::vector<std::string>& extra_files,
          const Json& manifest_base, double wall_seconds) {
  if (out_dir.empty()) {
    std::cout << summary.dump(2) << "\n";
    return;
  }
  std::vector<std::string> files = extra_files;
  files.push_back("summary.json");
  Json echo = manifest_base;
  echo["files"] = files;
  summary["manifest"] = echo;
  write_json(summary, (fs::path(out_dir) / "summary.json").string());

  Json manifest = echo;
  manifest["files"].push_back("manifest.json");
  manifest["wall_clock_seconds"] = wall_seconds;
  write_json(manifest, (fs::path(out_dir) / "manifest.json").string());
}

void prepare_out(const std::string& out) {
  if (out.empty()) return;
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec || !fs::is_directory(out))
    throw std::runtime_error("cannot create output directory '" + out + "'");
}

Json manifest_base(const std::string& command, const Resolved& r) {
  Json m;
  m["schema"] = kManifestSchema;
  m["tool"] = "bohmsim";
  m["version"] = kVersion;
  m["command"] = command;
  m["scenario"] = r.source;
  m["seed"] = r.spec.sampling.seed;
  m["n"] = r.spec.sampling.n;
  m["dt"] = r.spec.dt;
  return m;
}

bool too_many_aborts(const EnsembleReport& r) {
  return static_cast<double>(r.aborted) > 1e-3 * static_cast<double>(r.plan.n);
}

int cmd_list() {
  std::cout << "EXP1  crossing paths, no detector: trajectories bounce at I\n"
               "EXP2  flag pointer correlated with path B before I\n"
               "EXP3  path recorded in M's x-spin, converted to a pointer late\n"
               "EXP4  EXP3 with --conversion-time, --interfere and --frame-order knobs\n";
  return kExitOk;
}

int cmd_describe(const Knobs& k) {
  const Resolved r = resolve(k);
  const CompiledScenario c = compile(r.spec);
  std::cout << "# " << r.source << "\n";
  for (const auto& d : r.defaulted) std::cout << "# default: " << d << "\n";
  std::cout << "# interference time " << format_double(c.interference_time)
            << ", branch counts";
  for (auto n : branch_counts(c)) std::cout << " " << n;
  std::cout << "\n\n" << render_scenario(r.spec);
  return kExitOk;
}

int cmd_run(const Knobs& k, std::size_t n_samples) {
  const auto start = std::chrono::steady_clock::now();
  const Resolved r = resolve(k);
  prepare_out(k.out);
  const CompiledScenario c = compile(r.spec);

  EnsembleOptions opts;
  opts.workers = k.workers;
  opts.checkpoints = default_checkpoints(c);
  opts.sample_times = time_grid(c.spec.t0, c.spec.t1, n_samples);
  const EnsembleReport rep = run_ensemble(c, r.spec.sampling, opts);

  Json summary;
  summary["schema"] = kSummarySchema;
  summary["command"] = "run";
  summary["scenario"] = scenario_json(c);
  summary["defaulted"] = r.defaulted;
  summary["results"] = report_json(rep);
  summary["sample_times"] = rep.sample_times;
  summary["branch_tracks"] = branch_tracks_json(c, rep.sample_times);

  std::vector<std::string> files;
  if (!k.out.empty()) {
    write_trajectory_csv(rep, c, (fs::path(k.out) / "trajectories.csv").string());
    files.push_back("trajectories.csv");
    print_report_brief(rep, std::cout);
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(k.out, std::move(summary), files, manifest_base("run", r), wall);

  if (too_many_aborts(rep)) {
    std::cerr << "error: " << rep.aborted << " of " << rep.plan.n
              << " trajectories aborted (limit 0.1%)\n";
    return kExitAborted;
  }
  return kExitOk;
}

int cmd_flip_test(const Knobs& k, std::optional<double> early, std::optional<double> late) {
  const auto start = std::chrono::steady_clock::now();
  Knobs base = k;
  base.conversion_time.reset();
  const Resolved r = resolve(base);
  prepare_out(k.out);

  const double t_I = interference_time(r.spec);
  const double tc_late = late.value_or(conversion_time_of(r.spec).value_or(t_I * 1.5625));
  const double tc_early = early.value_or(0.25 * t_I);

  EnsembleOptions opts;
  opts.workers = k.workers;
  const FlipTestResult f =
      delayed_choice_flip_test(r.spec, tc_early, tc_late, r.spec.sampling, opts);

  Json summary;
  summary["schema"] = kSummarySchema;
  summary["command"] = "flip-test";
  summary["scenario"] = scenario_json(compile(r.spec));
  summary["flip_test"] = flip_json(f);
  summary["flip_fraction"] = f.flip_fraction;
  summary["early"] = report_json(f.early);
  summary["late"] = report_json(f.late);
  if (!k.out.empty())
    std::cout << "flip fraction " << f.flip_fraction << " (tc_early " << tc_early << ", tc_late "
              << tc_late << ")\n";
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(k.out, std::move(summary), {}, manifest_base("flip-test", r), wall);
  return too_many_aborts(f.early) || too_many_aborts(f.late) ? kExitAborted : kExitOk;
}

int cmd_compare_signaling(Knobs k, bool same_seed) {
  const auto start = std::chrono::steady_clock::now();
  if (k.scenario.empty()) k.scenario = "EXP4";
  if (parse_scenario_kind(k.scenario) != ScenarioKind::exp4)
    throw UsageError("compare-signaling runs the EXP4 interfere/blocked pair");
  if (k.interfere) throw UsageError("compare-signaling sets --interfere itself");
  prepare_out(k.out);

  Knobs a = k, b = k;
  a.interfere = "true";
  b.interfere = "false";
  const Resolved ra = resolve(a);
  Resolved rb_plan = resolve(b);
  if (!same_seed) rb_plan.spec.sampling.seed = ra.spec.sampling.seed + 1;
  const CompiledScenario ca = compile(ra.spec);
  const CompiledScenario cb = compile(rb_plan.spec);

  EnsembleOptions opts;
  opts.workers = k.workers;
  const EnsembleReport rep_a = run_ensemble(ca, ra.spec.sampling, opts);
  const EnsembleReport rep_b = run_ensemble(cb, rb_plan.spec.sampling, opts);
  const SignalingComparison cmp = no_signaling_compare(rep_a, rep_b);

  Json summary;
  summary["schema"] = kSummarySchema;
  summary["command"] = "compare-signaling";
  summary["comparison"] = signaling_json(cmp);
  summary["seed_interfere"] = ra.spec.sampling.seed;
  summary["seed_blocked"] = rb_plan.spec.sampling.seed;
  summary["per_trajectory_flip_fraction"] =
      same_seed ? Json(per_trajectory_flip_fraction(rep_a, rep_b)) : Json(nullptr);
  summary["interfere"] = {{"scenario", scenario_json(ca)}, {"results", report_json(rep_a)}};
  summary["blocked"] = {{"scenario", scenario_json(cb)}, {"results", report_json(rep_b)}};
  if (!k.out.empty())
    std::cout << "p(YES) interfere " << cmp.p_yes_a << ", blocked " << cmp.p_yes_b << ", delta "
              << cmp.delta << " (threshold " << cmp.threshold << ") "
              << (cmp.pass ? "pass" : "FAIL") << "\n";
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(k.out, std::move(summary), {}, manifest_base("compare-signaling", ra), wall);
  return too_many_aborts(rep_a) || too_many_aborts(rep_b) ? kExitAborted : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bohmian trajectory experiments: crossing paths, flags, spin records"};
  app.set_version_flag("--version", std::string("bohmsim ") + kVersion);
  app.require_subcommand(1);

  app.add_subcommand("list", "list built-in scenarios");

  Knobs describe_k;
  auto* describe = app.add_subcommand("describe", "print a resolved scenario in file format");
  add_knobs(describe, describe_k);

  Knobs run_k;
  std::size_t samples = 33;
  auto* run = app.add_subcommand("run", "integrate an ensemble and write artifacts");
  add_knobs(run, run_k);
  run->add_option("--samples", samples, "stored sample times per trajectory (t0..t1)");

  Knobs flip_k;
  std::optional<double> early, late;
  auto* flip = app.add_subcommand("flip-test", "early vs late conversion on shared Q0");
  add_knobs(flip, flip_k);
  flip->add_option("--early", early, "early conversion time (default t_I / 4)");
  flip->add_option("--late", late, "late conversion time (default: the scenario's)");

  Knobs sig_k;
  bool same_seed = false;
  auto* sig = app.add_subcommand("compare-signaling", "p(YES) with and without interference");
  add_knobs(sig, sig_k, false);
  sig->add_flag("--same-seed", same_seed, "draw both arms from the same Q0 set");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitInvalid;
  }

  try {
    if (app.got_subcommand("list")) return cmd_list();
    if (app.got_subcommand(describe)) return cmd_describe(describe_k);
    if (app.got_subcommand(run)) return cmd_run(run_k, samples);
    if (app.got_subcommand(flip)) return cmd_flip_test(flip_k, early, late);
    if (app.got_subcommand(sig)) return cmd_compare_signaling(sig_k, same_seed);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitInvalid;
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}
