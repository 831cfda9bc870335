#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "patchkit/cycles.hpp"
#include "patchkit/instance.hpp"

namespace patchkit {

struct Cell {
  int n = 0;
  double alpha = 1.0;
  double eps = 0.25;
  Family family = Family::complete;
  CostDist dist = CostDist::exp1;
  int trials = 1;
};

struct ExperimentPlan {
  std::vector<Cell> cells;
  std::uint64_t master_seed = 1;
  std::vector<PatchPolicy> policies = {PatchPolicy::global_min};
};

// Plan JSON: {"master_seed": u64, "policies": [...], "cells": [{"n":..,
// "alpha":.., "eps":.., "family":"..", "dist":"..", "trials":..}, ...]}
// or a grid form where "n", "alpha", ... are arrays crossed into cells.
ExperimentPlan plan_from_json(std::istream& in);
ExperimentPlan load_plan_file(const std::string& path);

// Trial seeds are derived from (master_seed, cell contents, trial), so a
// cell reproduces independently of its position in the plan.
std::uint64_t trial_seed(std::uint64_t master_seed, const Cell& cell,
                         int trial);

struct TrialRecord {
  Cell cell;
  int trial = 0;
  std::uint64_t seed = 0;
  PatchPolicy policy = PatchPolicy::global_min;
  std::string failure;  // "", "infeasible" or "no_patch"

  double v_ap = 0.0;
  long long nu_c = 0;
  double max_matched_cost = 0.0;
  double gamma_n = 0.0;
  double r0_ln_n = 0.0;
  bool has_tour = false;
  double tour_cost = 0.0;
  double overhead = 0.0;  // tour_cost - v_ap
  double ratio = 0.0;     // tour_cost / v_ap
  long long sum_chi = 0;

  long long ms_gen = 0, ms_ap = 0, ms_patch = 0;
};

// Runs every (trial, policy) of a cell; failures are recorded, never
// dropped. Trials run on a worker pool capped by PATCHKIT_THREADS; results
// are slotted by (trial, policy), so parallel and serial runs are
// byte-identical.
std::vector<TrialRecord> run_cell(const ExperimentPlan& plan, const Cell& cell);

// All cells of the plan, records ordered by (cell, trial, policy).
std::vector<TrialRecord> run_plan(const ExperimentPlan& plan);

inline constexpr const char* kCsvHeader =
    "n,alpha,eps,family,dist,seed,v_ap,nu_c,max_matched_cost,gamma_n,"
    "r0_ln_n,policy,tour_cost,overhead,ratio,sum_chi,failure,ms_gen,ms_ap,"
    "ms_patch";

// with_timing=false writes zeros in the ms_* columns so reruns with one
// master seed are byte-identical.
void write_csv(const std::vector<TrialRecord>& records, std::ostream& out,
               bool with_timing = false);
std::vector<TrialRecord> read_csv(std::istream& in);

struct CellSummary {
  Cell cell;
  PatchPolicy policy = PatchPolicy::global_min;
  int trials = 0;
  int solved = 0;
  int patched = 0;
  double mean_v_ap = 0.0, median_v_ap = 0.0, q95_v_ap = 0.0;
  double mean_nu_c = 0.0, median_nu_c = 0.0, q95_nu_c = 0.0;
  double mean_overhead = 0.0, median_overhead = 0.0, q95_overhead = 0.0;
  double mean_ratio = 0.0, median_ratio = 0.0;
  double frac_nu_c_le_r0_ln_n = 0.0;   // over solved trials
  double frac_max_cost_le_gamma = 0.0; // over solved trials
  double patch_failure_rate = 0.0;     // no_patch over solved trials
  double mean_sum_chi = 0.0;
};

std::vector<CellSummary> summarize(const std::vector<TrialRecord>& records);
void write_summary_csv(const std::vector<CellSummary>& summaries,
                       std::ostream& out);
void print_summary_table(const std::vector<CellSummary>& summaries,
                         std::ostream& out);

// Worker pool width: PATCHKIT_THREADS if set (>= 1), else hardware
// concurrency.
int worker_count();

}  // namespace patchkit
