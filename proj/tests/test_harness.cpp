#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <sstream>

#include "doctest.h"
#include "patchkit/experiment.hpp"
#include "patchkit/ssp.hpp"

using namespace patchkit;

namespace {

ExperimentPlan tiny_plan() {
  ExperimentPlan plan;
  plan.master_seed = 99;
  plan.policies = {PatchPolicy::global_min};
  plan.cells.push_back(Cell{4, 0.5, 0.2, Family::complete, CostDist::exp1, 5});
  return plan;
}

std::string to_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  write_csv(records, out);
  return out.str();
}

}  // namespace

TEST_CASE("a five-trial complete cell yields five tours above v_ap") {
  ExperimentPlan plan = tiny_plan();
  auto records = run_cell(plan, plan.cells[0]);
  REQUIRE(records.size() == 5);
  for (const auto& r : records) {
    CHECK(r.failure.empty());
    CHECK(r.has_tour);
    CHECK(r.tour_cost >= r.v_ap - 1e-12);
    CHECK(r.ratio >= 1.0 - 1e-12);
    CHECK(r.nu_c >= 1);
  }
}

TEST_CASE("rerunning a plan reproduces the CSV byte for byte") {
  ExperimentPlan plan = tiny_plan();
  plan.cells.push_back(
      Cell{12, 0.3, 0.25, Family::random_regularish, CostDist::uniform01, 4});
  std::string first = to_csv(run_plan(plan));
  std::string second = to_csv(run_plan(plan));
  CHECK(first == second);
  CHECK(first.find("nan") == std::string::npos);
}

TEST_CASE("trial seeds depend on cell contents, not plan position") {
  Cell cell{12, 0.3, 0.25, Family::random_regularish, CostDist::exp1, 4};
  Cell other{24, 0.3, 0.25, Family::random_regularish, CostDist::exp1, 4};
  CHECK(trial_seed(1, cell, 0) == trial_seed(1, cell, 0));
  CHECK(trial_seed(1, cell, 0) != trial_seed(1, cell, 1));
  CHECK(trial_seed(1, cell, 0) != trial_seed(2, cell, 0));
  CHECK(trial_seed(1, cell, 0) != trial_seed(1, other, 0));

  // the same cell inside different plans produces identical records
  ExperimentPlan small;
  small.master_seed = 5;
  small.cells = {cell};
  ExperimentPlan big;
  big.master_seed = 5;
  big.cells = {other, cell};
  auto lone = run_cell(small, cell);
  auto embedded = run_cell(big, cell);
  CHECK(to_csv(lone) == to_csv(embedded));
}

TEST_CASE("worker pool width does not change the records") {
  ExperimentPlan plan = tiny_plan();
  plan.cells[0].trials = 8;
  setenv("PATCHKIT_THREADS", "1", 1);
  std::string serial = to_csv(run_plan(plan));
  setenv("PATCHKIT_THREADS", "4", 1);
  std::string parallel = to_csv(run_plan(plan));
  unsetenv("PATCHKIT_THREADS");
  CHECK(serial == parallel);
}

TEST_CASE("tour cost minus v_ap equals the sum of logged patch deltas") {
  ExperimentPlan plan = tiny_plan();
  plan.cells = {Cell{30, 0.4, 0.2, Family::random_regularish, CostDist::exp1, 6}};
  for (int t = 0; t < plan.cells[0].trials; ++t) {
    std::uint64_t seed = trial_seed(plan.master_seed, plan.cells[0], t);
    InstanceConfig cfg{30, 0.4, 0.2, Family::random_regularish, CostDist::exp1};
    Instance inst = make_instance(cfg, seed);
    SolveOutput out = solve_ap(inst);
    REQUIRE(out.ok());
    PatchResult res =
        karp_patch(inst, decompose(out.solution.sigma), PatchPolicy::global_min);
    if (!res.success) continue;
    double delta_sum = 0.0;
    for (const PatchMove& m : res.log) delta_sum += m.delta;
    CHECK(res.tour.cost - out.solution.value ==
          doctest::Approx(delta_sum).epsilon(1e-9));
  }
}

TEST_CASE("records survive a CSV round trip") {
  ExperimentPlan plan = tiny_plan();
  plan.policies = {PatchPolicy::global_min, PatchPolicy::analysis_r};
  auto records = run_plan(plan);
  REQUIRE(records.size() == 10);  // 5 trials x 2 policies
  std::string text = to_csv(records);
  std::istringstream in(text);
  auto parsed = read_csv(in);
  REQUIRE(parsed.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(parsed[i].seed == records[i].seed);
    CHECK(parsed[i].policy == records[i].policy);
    CHECK(parsed[i].v_ap == records[i].v_ap);
    CHECK(parsed[i].has_tour == records[i].has_tour);
    if (records[i].has_tour) CHECK(parsed[i].tour_cost == records[i].tour_cost);
    CHECK(parsed[i].failure == records[i].failure);
  }
}

TEST_CASE("summary of a single record echoes that record") {
  ExperimentPlan plan = tiny_plan();
  plan.cells[0].trials = 1;
  auto records = run_plan(plan);
  REQUIRE(records.size() == 1);
  auto summaries = summarize(records);
  REQUIRE(summaries.size() == 1);
  const CellSummary& s = summaries[0];
  CHECK(s.trials == 1);
  CHECK(s.solved == 1);
  CHECK(s.mean_v_ap == doctest::Approx(records[0].v_ap));
  CHECK(s.median_v_ap == doctest::Approx(records[0].v_ap));
  CHECK(s.mean_nu_c == doctest::Approx(static_cast<double>(records[0].nu_c)));
  CHECK(s.median_overhead == doctest::Approx(records[0].overhead));
  CHECK(s.patch_failure_rate == 0.0);
}

TEST_CASE("ratio column is always at least one") {
  ExperimentPlan plan;
  plan.master_seed = 7;
  plan.policies = {PatchPolicy::global_min};
  plan.cells = {
      Cell{16, 0.4, 0.2, Family::clustered_adversarial, CostDist::exp1, 10},
      Cell{16, 0.4, 0.2, Family::complete, CostDist::uniform01, 10}};
  auto records = run_plan(plan);
  auto summaries = summarize(records);
  for (const auto& s : summaries)
    if (s.patched > 0) CHECK(s.mean_ratio >= 1.0 - 1e-12);
  for (const auto& r : records)
    if (r.has_tour) CHECK(r.ratio >= 1.0 - 1e-12);
}

TEST_CASE("plan JSON: explicit cells and grid form") {
  std::istringstream cells_doc(R"({
    "master_seed": 11,
    "policies": ["global_min", "analysis_R"],
    "cells": [
      {"n": 50, "alpha": 0.3, "eps": 0.15, "family": "complete", "dist": "exp1", "trials": 3},
      {"n": 20, "alpha": 0.5, "eps": 0.2, "family": "clustered_adversarial", "trials": 2}
    ]
  })");
  ExperimentPlan plan = plan_from_json(cells_doc);
  CHECK(plan.master_seed == 11);
  REQUIRE(plan.cells.size() == 2);
  CHECK(plan.cells[0].n == 50);
  CHECK(plan.cells[1].dist == CostDist::exp1);  // default
  CHECK(plan.policies.size() == 2);

  std::istringstream grid_doc(R"({
    "master_seed": 3,
    "n": [100, 200],
    "alpha": 0.3,
    "eps": [0.1, 0.15],
    "family": ["random_regularish"],
    "trials": 5
  })");
  ExperimentPlan grid = plan_from_json(grid_doc);
  CHECK(grid.cells.size() == 4);
  CHECK(grid.cells.front().trials == 5);
}

TEST_CASE("summarize rejects an empty record set") {
  CHECK_THROWS_AS(summarize({}), std::invalid_argument);
}
