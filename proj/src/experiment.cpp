#include "patchkit/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "patchkit/rng.hpp"
#include "patchkit/ssp.hpp"

namespace patchkit {

namespace {

std::uint64_t double_bits(double x) {
  std::uint64_t bits;
  static_assert(sizeof(bits) == sizeof(x));
  std::memcpy(&bits, &x, sizeof(bits));
  return bits;
}

Cell cell_from_json(const nlohmann::json& j) {
  Cell cell;
  cell.n = j.at("n").get<int>();
  cell.alpha = j.at("alpha").get<double>();
  cell.eps = j.at("eps").get<double>();
  cell.family = family_from_name(j.at("family").get<std::string>());
  cell.dist = j.contains("dist")
                  ? cost_dist_from_name(j.at("dist").get<std::string>())
                  : CostDist::exp1;
  cell.trials = j.at("trials").get<int>();
  if (cell.trials < 1) throw std::invalid_argument("trials must be >= 1");
  return cell;
}

template <class T>
std::vector<T> as_list(const nlohmann::json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}

}  // namespace

ExperimentPlan plan_from_json(std::istream& in) {
  nlohmann::json doc = nlohmann::json::parse(in);
  ExperimentPlan plan;
  plan.master_seed = doc.value("master_seed", std::uint64_t{1});
  if (doc.contains("policies")) {
    plan.policies.clear();
    for (const auto& p : doc.at("policies"))
      plan.policies.push_back(patch_policy_from_name(p.get<std::string>()));
  }
  if (plan.policies.empty())
    throw std::invalid_argument("plan needs at least one patch policy");

  if (doc.contains("cells")) {
    for (const auto& jc : doc.at("cells")) plan.cells.push_back(cell_from_json(jc));
  } else {
    // grid form: cross product of parameter lists
    auto ns = as_list<int>(doc.at("n"));
    auto alphas = as_list<double>(doc.at("alpha"));
    auto epss = as_list<double>(doc.at("eps"));
    std::vector<std::string> families;
    for (const auto& f : as_list<std::string>(doc.at("family")))
      families.push_back(f);
    auto dists = doc.contains("dist")
                     ? as_list<std::string>(doc.at("dist"))
                     : std::vector<std::string>{"exp1"};
    int trials = doc.at("trials").get<int>();
    for (int n : ns)
      for (double alpha : alphas)
        for (double eps : epss)
          for (const auto& family : families)
            for (const auto& dist : dists)
              plan.cells.push_back(Cell{n, alpha, eps,
                                        family_from_name(family),
                                        cost_dist_from_name(dist), trials});
  }
  if (plan.cells.empty()) throw std::invalid_argument("plan has no cells");
  return plan;
}

ExperimentPlan load_plan_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open plan file: " + path);
  return plan_from_json(in);
}

std::uint64_t trial_seed(std::uint64_t master_seed, const Cell& cell,
                         int trial) {
  std::uint64_t h = rng::stream_key(master_seed, rng::Stream::trial,
                                    static_cast<std::uint64_t>(cell.n),
                                    double_bits(cell.alpha));
  h = rng::mix64(h ^ double_bits(cell.eps));
  h = rng::mix64(h ^ (static_cast<std::uint64_t>(cell.family) << 8 |
                      static_cast<std::uint64_t>(cell.dist)));
  return rng::mix64(h ^ static_cast<std::uint64_t>(trial));
}

int worker_count() {
  if (const char* env = std::getenv("PATCHKIT_THREADS")) {
    int k = std::atoi(env);
    if (k >= 1) return k;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

using Clock = std::chrono::steady_clock;

long long ms_since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                               start)
      .count();
}

// One generated instance, solved once, patched once per policy.
void run_trial(const ExperimentPlan& plan, const Cell& cell, int trial,
               TrialRecord* slot) {
  const std::size_t policies = plan.policies.size();
  InstanceConfig cfg{cell.n, cell.alpha, cell.eps, cell.family, cell.dist};
  const std::uint64_t seed = trial_seed(plan.master_seed, cell, trial);

  for (std::size_t p = 0; p < policies; ++p) {
    slot[p] = TrialRecord{};
    slot[p].cell = cell;
    slot[p].trial = trial;
    slot[p].seed = seed;
    slot[p].policy = plan.policies[p];
    slot[p].gamma_n = gamma_value(cell.n, cell.eps);
    slot[p].r0_ln_n = r0_value(cell.n, cell.eps) * std::log(cell.n);
  }

  auto t0 = Clock::now();
  Instance inst = make_instance(cfg, seed);
  const long long ms_gen = ms_since(t0);

  auto t1 = Clock::now();
  SolveOutput solved = solve_ap(inst);
  const long long ms_ap = ms_since(t1);

  for (std::size_t p = 0; p < policies; ++p) {
    slot[p].ms_gen = ms_gen;
    slot[p].ms_ap = ms_ap;
  }
  if (!solved.ok()) {
    for (std::size_t p = 0; p < policies; ++p) slot[p].failure = "infeasible";
    return;
  }

  CycleCover cover = decompose(solved.solution.sigma);
  for (std::size_t p = 0; p < policies; ++p) {
    TrialRecord& rec = slot[p];
    rec.v_ap = solved.solution.value;
    rec.nu_c = solved.diagnostics.final_cycle_count;
    rec.max_matched_cost = solved.diagnostics.max_matched_cost;
    rec.sum_chi = solved.diagnostics.short_cycle_total;

    auto t2 = Clock::now();
    PatchResult patched = karp_patch(inst, cover, plan.policies[p]);
    rec.ms_patch = ms_since(t2);
    if (!patched.success) {
      rec.failure = "no_patch";
      continue;
    }
    rec.has_tour = true;
    rec.tour_cost = patched.tour.cost;
    rec.overhead = patched.tour.cost - rec.v_ap;
    rec.ratio = patched.tour.cost / rec.v_ap;
  }
}

void run_tasks(const ExperimentPlan& plan,
               const std::vector<std::pair<const Cell*, int>>& tasks,
               std::vector<TrialRecord>& records) {
  const std::size_t policies = plan.policies.size();
  std::atomic<std::size_t> next{0};
  const int workers =
      std::max(1, std::min<int>(worker_count(),
                                static_cast<int>(tasks.size())));
  auto worker = [&]() {
    for (;;) {
      std::size_t k = next.fetch_add(1);
      if (k >= tasks.size()) return;
      run_trial(plan, *tasks[k].first, tasks[k].second,
                &records[k * policies]);
    }
  };
  if (workers == 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

}  // namespace

std::vector<TrialRecord> run_cell(const ExperimentPlan& plan,
                                  const Cell& cell) {
  std::vector<std::pair<const Cell*, int>> tasks;
  for (int t = 0; t < cell.trials; ++t) tasks.emplace_back(&cell, t);
  std::vector<TrialRecord> records(tasks.size() * plan.policies.size());
  run_tasks(plan, tasks, records);
  return records;
}

std::vector<TrialRecord> run_plan(const ExperimentPlan& plan) {
  std::vector<std::pair<const Cell*, int>> tasks;
  for (const Cell& cell : plan.cells)
    for (int t = 0; t < cell.trials; ++t) tasks.emplace_back(&cell, t);
  std::vector<TrialRecord> records(tasks.size() * plan.policies.size());
  run_tasks(plan, tasks, records);
  return records;
}

namespace {

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string gshort(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", x);
  return buf;
}

}  // namespace

void write_csv(const std::vector<TrialRecord>& records, std::ostream& out,
               bool with_timing) {
  out << kCsvHeader << '\n';
  for (const TrialRecord& r : records) {
    out << r.cell.n << ',' << gshort(r.cell.alpha) << ',' << gshort(r.cell.eps)
        << ',' << family_name(r.cell.family) << ','
        << cost_dist_name(r.cell.dist) << ',' << r.seed << ',';
    const bool solved = r.failure != "infeasible";
    if (solved)
      out << g17(r.v_ap) << ',' << r.nu_c << ',' << g17(r.max_matched_cost);
    else
      out << ",,";
    out << ',' << g17(r.gamma_n) << ',' << g17(r.r0_ln_n) << ','
        << patch_policy_name(r.policy) << ',';
    if (r.has_tour)
      out << g17(r.tour_cost) << ',' << g17(r.overhead) << ',' << g17(r.ratio);
    else
      out << ",,";
    out << ',';
    if (solved) out << r.sum_chi;
    out << ',' << r.failure << ',' << (with_timing ? r.ms_gen : 0) << ','
        << (with_timing ? r.ms_ap : 0) << ',' << (with_timing ? r.ms_patch : 0)
        << '\n';
  }
}

std::vector<TrialRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
  if (line != kCsvHeader)
    throw std::runtime_error("unexpected CSV header: " + line);

  std::vector<TrialRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    f.resize(20);
    TrialRecord r;
    r.cell.n = std::stoi(f[0]);
    r.cell.alpha = std::stod(f[1]);
    r.cell.eps = std::stod(f[2]);
    r.cell.family = family_from_name(f[3]);
    r.cell.dist = cost_dist_from_name(f[4]);
    r.seed = std::stoull(f[5]);
    r.failure = f[16];
    const bool solved = r.failure != "infeasible";
    if (solved) {
      r.v_ap = std::stod(f[6]);
      r.nu_c = std::stoll(f[7]);
      r.max_matched_cost = std::stod(f[8]);
      r.sum_chi = std::stoll(f[15]);
    }
    r.gamma_n = std::stod(f[9]);
    r.r0_ln_n = std::stod(f[10]);
    r.policy = patch_policy_from_name(f[11]);
    if (!f[12].empty()) {
      r.has_tour = true;
      r.tour_cost = std::stod(f[12]);
      r.overhead = std::stod(f[13]);
      r.ratio = std::stod(f[14]);
    }
    r.ms_gen = std::stoll(f[17]);
    r.ms_ap = std::stoll(f[18]);
    r.ms_patch = std::stoll(f[19]);
    records.push_back(std::move(r));
  }
  return records;
}

namespace {

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

// nearest-rank upper quantile
double q95_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(v.size())));
  rank = std::max<std::size_t>(1, std::min(rank, v.size()));
  return v[rank - 1];
}

bool same_cell(const Cell& a, const Cell& b) {
  return a.n == b.n && a.alpha == b.alpha && a.eps == b.eps &&
         a.family == b.family && a.dist == b.dist;
}

}  // namespace

std::vector<CellSummary> summarize(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw std::invalid_argument("no records to summarize");
  std::vector<CellSummary> out;
  for (const TrialRecord& r : records) {
    CellSummary* s = nullptr;
    for (auto& cand : out)
      if (same_cell(cand.cell, r.cell) && cand.policy == r.policy) {
        s = &cand;
        break;
      }
    if (!s) {
      out.push_back(CellSummary{});
      s = &out.back();
      s->cell = r.cell;
      s->policy = r.policy;
    }
    ++s->trials;
  }

  for (CellSummary& s : out) {
    std::vector<double> v_ap, nu_c, overhead, ratio, sum_chi;
    int le_r0 = 0, le_gamma = 0, no_patch = 0;
    for (const TrialRecord& r : records) {
      if (!same_cell(r.cell, s.cell) || r.policy != s.policy) continue;
      if (r.failure == "infeasible") continue;
      ++s.solved;
      v_ap.push_back(r.v_ap);
      nu_c.push_back(static_cast<double>(r.nu_c));
      sum_chi.push_back(static_cast<double>(r.sum_chi));
      if (static_cast<double>(r.nu_c) <= r.r0_ln_n) ++le_r0;
      if (r.max_matched_cost <= r.gamma_n) ++le_gamma;
      if (r.has_tour) {
        ++s.patched;
        overhead.push_back(r.overhead);
        ratio.push_back(r.ratio);
      } else {
        ++no_patch;
      }
    }
    s.mean_v_ap = mean_of(v_ap);
    s.median_v_ap = median_of(v_ap);
    s.q95_v_ap = q95_of(v_ap);
    s.mean_nu_c = mean_of(nu_c);
    s.median_nu_c = median_of(nu_c);
    s.q95_nu_c = q95_of(nu_c);
    s.mean_overhead = mean_of(overhead);
    s.median_overhead = median_of(overhead);
    s.q95_overhead = q95_of(overhead);
    s.mean_ratio = mean_of(ratio);
    s.median_ratio = median_of(ratio);
    s.mean_sum_chi = mean_of(sum_chi);
    if (s.solved > 0) {
      s.frac_nu_c_le_r0_ln_n = static_cast<double>(le_r0) / s.solved;
      s.frac_max_cost_le_gamma = static_cast<double>(le_gamma) / s.solved;
      s.patch_failure_rate = static_cast<double>(no_patch) / s.solved;
    }
  }
  return out;
}

void write_summary_csv(const std::vector<CellSummary>& summaries,
                       std::ostream& out) {
  out << "n,alpha,eps,family,dist,policy,trials,solved,patched,"
         "mean_v_ap,median_v_ap,q95_v_ap,mean_nu_c,median_nu_c,q95_nu_c,"
         "mean_overhead,median_overhead,q95_overhead,mean_ratio,median_ratio,"
         "frac_nu_c_le_r0_ln_n,frac_max_cost_le_gamma_n,patch_failure_rate,"
         "mean_sum_chi\n";
  for (const CellSummary& s : summaries) {
    out << s.cell.n << ',' << gshort(s.cell.alpha) << ',' << gshort(s.cell.eps)
        << ',' << family_name(s.cell.family) << ','
        << cost_dist_name(s.cell.dist) << ',' << patch_policy_name(s.policy)
        << ',' << s.trials << ',' << s.solved << ',' << s.patched << ','
        << g17(s.mean_v_ap) << ',' << g17(s.median_v_ap) << ','
        << g17(s.q95_v_ap) << ',' << g17(s.mean_nu_c) << ','
        << g17(s.median_nu_c) << ',' << g17(s.q95_nu_c) << ','
        << g17(s.mean_overhead) << ',' << g17(s.median_overhead) << ','
        << g17(s.q95_overhead) << ',' << g17(s.mean_ratio) << ','
        << g17(s.median_ratio) << ',' << g17(s.frac_nu_c_le_r0_ln_n) << ','
        << g17(s.frac_max_cost_le_gamma) << ',' << g17(s.patch_failure_rate)
        << ',' << g17(s.mean_sum_chi) << '\n';
  }
}

void print_summary_table(const std::vector<CellSummary>& summaries,
                         std::ostream& out) {
  out << std::left << std::setw(6) << "n" << std::setw(7) << "alpha"
      << std::setw(6) << "eps" << std::setw(23) << "family" << std::setw(11)
      << "dist" << std::setw(12) << "policy" << std::right << std::setw(7)
      << "trials" << std::setw(8) << "solved" << std::setw(9) << "mean_ap"
      << std::setw(9) << "mean_nu" << std::setw(11) << "med_ovhd"
      << std::setw(10) << "med_ratio" << std::setw(9) << "failpct" << '\n';
  for (const CellSummary& s : summaries) {
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "%-6d%-7g%-6g%-23s%-11s%-12s%7d%8d%9.4f%9.2f%11.5f%10.5f%8.1f%%",
                  s.cell.n, s.cell.alpha, s.cell.eps,
                  family_name(s.cell.family).c_str(),
                  cost_dist_name(s.cell.dist).c_str(),
                  patch_policy_name(s.policy).c_str(), s.trials, s.solved,
                  s.mean_v_ap, s.mean_nu_c, s.median_overhead, s.median_ratio,
                  100.0 * s.patch_failure_rate);
    out << buf << '\n';
  }
}

}  // namespace patchkit
