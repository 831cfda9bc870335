// patchkit: generate perturbed digraph instances, solve the assignment
// problem incrementally, patch cycle covers into tours, and drive batched
// experiments.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "patchkit/experiment.hpp"
#include "patchkit/oracles.hpp"
#include "patchkit/ssp.hpp"

namespace {

using namespace patchkit;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSolverFailure = 2;
constexpr int kExitVerifyMismatch = 3;

int cmd_gen(const std::string& family, int n, double alpha, double eps,
            const std::string& dist, std::uint64_t seed,
            const std::string& out_path) {
  InstanceConfig cfg;
  cfg.n = n;
  cfg.alpha = alpha;
  cfg.eps = eps;
  cfg.family = family_from_name(family);
  cfg.cost_dist = cost_dist_from_name(dist);
  Instance inst = make_instance(cfg, seed);
  save_instance_file(inst, out_path);
  std::cout << "wrote " << out_path << " (n=" << n
            << ", arcs=" << inst.arc_count() << ")\n";
  return kExitOk;
}

int cmd_solve(const std::string& in_path, const std::string& out_path,
              const std::string& trace_path) {
  Instance inst = load_instance_file(in_path);
  SolverOptions opts;
  std::ofstream trace;
  if (!trace_path.empty()) {
    trace.open(trace_path);
    if (!trace) throw std::runtime_error("cannot open trace file");
    opts.trace = &trace;
  }
  SolveOutput out = solve_ap(inst, opts);
  if (!out.ok()) {
    std::cerr << "infeasible at insertion " << out.infeasible.r << " ("
              << out.infeasible.reachable_rows.size() << " rows reachable)\n";
    return kExitSolverFailure;
  }
  std::cout << "value " << out.solution.value << "\ncycles "
            << out.diagnostics.final_cycle_count << "\nmax_matched_cost "
            << out.diagnostics.max_matched_cost << "\nshort_cycles "
            << out.diagnostics.short_cycle_total << "\n";
  if (!out_path.empty()) {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot open solution file");
    write_solution(out.solution, f);
  }
  return kExitOk;
}

int cmd_patch(const std::string& in_path, const std::string& policy_name,
              const std::string& log_path) {
  Instance inst = load_instance_file(in_path);
  PatchPolicy policy = patch_policy_from_name(policy_name);
  SolveOutput solved = solve_ap(inst);
  if (!solved.ok()) {
    std::cerr << "infeasible at insertion " << solved.infeasible.r << "\n";
    return kExitSolverFailure;
  }
  CycleCover cover = decompose(solved.solution.sigma);
  PatchResult patched = karp_patch(inst, cover, policy);
  if (!log_path.empty()) {
    std::ofstream f(log_path);
    if (!f) throw std::runtime_error("cannot open patch log file");
    for (const PatchMove& m : patched.log) {
      char buf[200];
      std::snprintf(buf, sizeof(buf),
                    "{\"x\":%d,\"y\":%d,\"u\":%d,\"v\":%d,\"delta\":%.17g,"
                    "\"inserted_cost\":%.17g}\n",
                    m.x, m.y, m.u, m.v, m.delta, m.inserted_cost);
      f << buf;
    }
  }
  std::cout << "v_ap " << solved.solution.value << "\ncycles "
            << cover.cycle_count() << "\n";
  if (!patched.success) {
    std::cerr << "no patching pair available with " << policy_name << " and "
              << patched.remaining.cycle_count() << " cycles left\n";
    return kExitSolverFailure;
  }
  std::cout << "tour_cost " << patched.tour.cost << "\noverhead "
            << patched.total_delta << "\npatches " << patched.log.size()
            << "\n";
  return kExitOk;
}

int cmd_verify(int n, int trials, std::uint64_t seed, double alpha,
               double eps) {
  if (n < 2 || n > oracles::kMaxBruteApN) {
    std::cerr << "verify needs 2 <= n <= " << oracles::kMaxBruteApN << "\n";
    return kExitUsage;
  }
  const Family families[] = {Family::complete, Family::random_regularish,
                             Family::clustered_adversarial};
  int matches = 0;
  for (int t = 0; t < trials; ++t) {
    InstanceConfig cfg;
    cfg.n = n;
    cfg.alpha = alpha;
    cfg.eps = eps;
    cfg.family = families[t % 3];
    cfg.cost_dist = t % 2 ? CostDist::uniform01 : CostDist::exp1;
    Instance inst = make_instance(cfg, seed + static_cast<std::uint64_t>(t));

    auto brute = oracles::brute_ap(inst);
    SolveOutput solved = solve_ap(inst);
    bool ok;
    if (brute.value == Instance::infinity()) {
      ok = !solved.ok();
    } else {
      ok = solved.ok() &&
           std::abs(solved.solution.value - brute.value) <= 1e-9 &&
           verify_optimal(inst, solved.solution).pass;
    }
    if (ok)
      ++matches;
    else
      std::cerr << "mismatch at trial " << t << " (seed "
                << seed + static_cast<std::uint64_t>(t) << ")\n";
  }
  std::cout << matches << "/" << trials << " oracle matches\n";
  return matches == trials ? kExitOk : kExitVerifyMismatch;
}

int cmd_experiment(const std::string& plan_path, const std::string& out_path,
                   bool with_timing) {
  ExperimentPlan plan = load_plan_file(plan_path);
  std::vector<TrialRecord> records = run_plan(plan);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("cannot open output file");
  write_csv(records, out, with_timing);
  int failures = 0;
  for (const auto& r : records)
    if (!r.failure.empty()) ++failures;
  std::cout << "wrote " << records.size() << " records to " << out_path << " ("
            << failures << " failures)\n";
  return kExitOk;
}

int cmd_report(const std::string& in_path, const std::string& out_path) {
  std::ifstream in(in_path);
  if (!in) throw std::runtime_error("cannot open results file: " + in_path);
  std::vector<TrialRecord> records = read_csv(in);
  std::vector<CellSummary> summaries = summarize(records);
  print_summary_table(summaries, std::cout);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open summary file");
    write_summary_csv(summaries, out);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"assignment-based tour patching toolkit"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate an instance file");
  std::string family = "complete", dist = "exp1", out_path;
  int n = 100;
  double alpha = 0.5, eps = 0.25;
  std::uint64_t seed = 1;
  gen->add_option("--family", family, "complete|random_regularish|clustered_adversarial");
  gen->add_option("--n", n, "vertex count")->required();
  gen->add_option("--alpha", alpha, "base density in (0,1]");
  gen->add_option("--eps", eps, "perturbation exponent (arc prob n^-eps)");
  gen->add_option("--dist", dist, "exp1|uniform01");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--out", out_path, "output instance file")->required();

  auto* solve = app.add_subcommand("solve", "solve the assignment problem");
  std::string solve_in, solve_out, trace_path;
  solve->add_option("--in", solve_in, "instance file")->required();
  solve->add_option("--out", solve_out, "solution JSON file");
  solve->add_option("--trace", trace_path, "augmentation trace (JSON lines)");

  auto* patch = app.add_subcommand("patch", "solve then patch to a tour");
  std::string patch_in, policy = "global_min", log_path;
  patch->add_option("--in", patch_in, "instance file")->required();
  patch->add_option("--policy", policy, "global_min|analysis_R");
  patch->add_option("--log", log_path, "patch log (JSON lines)");

  auto* verify = app.add_subcommand("verify", "cross-check against oracles");
  int verify_n = 6, verify_trials = 50;
  std::uint64_t verify_seed = 1;
  double verify_alpha = 0.5, verify_eps = 0.25;
  verify->add_option("--n", verify_n, "instance size (<= 9)");
  verify->add_option("--trials", verify_trials, "number of trials");
  verify->add_option("--seed", verify_seed, "base seed");
  verify->add_option("--alpha", verify_alpha, "base density");
  verify->add_option("--eps", verify_eps, "perturbation exponent");

  auto* experiment = app.add_subcommand("experiment", "run an experiment plan");
  std::string plan_path, exp_out;
  bool with_timing = false;
  experiment->add_option("--plan", plan_path, "plan JSON file")->required();
  experiment->add_option("--out", exp_out, "results CSV file")->required();
  experiment->add_flag("--timing", with_timing,
                       "record wall-clock columns (breaks byte-level rerun "
                       "identity)");

  auto* report = app.add_subcommand("report", "summarize a results CSV");
  std::string report_in, report_out;
  report->add_option("--in", report_in, "results CSV")->required();
  report->add_option("--out", report_out, "summary CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed())
      return cmd_gen(family, n, alpha, eps, dist, seed, out_path);
    if (solve->parsed()) return cmd_solve(solve_in, solve_out, trace_path);
    if (patch->parsed()) return cmd_patch(patch_in, policy, log_path);
    if (verify->parsed())
      return cmd_verify(verify_n, verify_trials, verify_seed, verify_alpha,
                        verify_eps);
    if (experiment->parsed())
      return cmd_experiment(plan_path, exp_out, with_timing);
    if (report->parsed()) return cmd_report(report_in, report_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
