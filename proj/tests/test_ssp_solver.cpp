#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "patchkit/oracles.hpp"
#include "patchkit/ssp.hpp"
#include "test_util.hpp"

using namespace patchkit;
using testutil::matrix_instance;
using testutil::small_instance;

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

TEST_CASE("2x2: picks the cheaper of the two diagonals") {
  Instance inst = matrix_instance({{inf, 2.0}, {3.0, inf}});
  // only the swap exists on a 2-vertex digraph
  SolveOutput out = solve_ap(inst);
  REQUIRE(out.ok());
  CHECK(out.solution.value == doctest::Approx(5.0));
  CHECK(out.solution.sigma == std::vector<int>{1, 0});
}

TEST_CASE("agrees with the brute-force oracle on 200 small instances") {
  int checked = 0;
  for (int n = 4; n <= 8; ++n) {
    for (int t = 0; t < 40; ++t) {
      std::uint64_t seed = 1000 * n + t;
      Instance inst = small_instance(n, seed);
      auto brute = oracles::brute_ap(inst);
      SolveOutput out = solve_ap(inst);
      if (brute.value == inf) {
        CHECK_FALSE(out.ok());
      } else {
        REQUIRE(out.ok());
        CHECK(std::abs(out.solution.value - brute.value) <= 1e-9);
        CHECK(verify_optimal(inst, out.solution).pass);
      }
      ++checked;
    }
  }
  CHECK(checked == 200);
}

TEST_CASE("dual extension reproduces the closed-form minima") {
  // 2x2 state solved at r=1 with u=(1), v=(0); inserting the second pair:
  // u_2 = C(2,1) - v_1 = 3 - 0 = 3, v_2 = min(C(2,2)-u_2, C(1,2)-u_1)
  //     = min(10 - 3, 2 - 1) = 1
  Instance inst = matrix_instance({{1.0, 2.0}, {3.0, 10.0}});
  PrefixState state(inst, {0, 1}, {0, 1}, 2);
  state.force_prefix({0}, {1.0}, {0.0});
  DualExtension ext = extend_duals(state, inst);
  REQUIRE(ext.ok());
  CHECK(ext.u_new == doctest::Approx(3.0));
  CHECK(ext.v_new == doctest::Approx(1.0));
}

TEST_CASE("a single prefix arc pins the extended row dual exactly") {
  Instance inst = matrix_instance({{1.0, 4.0}, {7.5, 2.0}});
  PrefixState state(inst, {0, 1}, {0, 1}, 2);
  state.force_prefix({0}, {0.25}, {0.75});
  DualExtension ext = extend_duals(state, inst);
  REQUIRE(ext.ok());
  CHECK(ext.u_new == doctest::Approx(7.5 - 0.75));
}

TEST_CASE("extension leaves a zero reduced cost in the inserted row") {
  InstanceConfig cfg;
  cfg.n = 24;
  cfg.alpha = 0.4;
  cfg.eps = 0.2;
  cfg.family = Family::random_regularish;
  Instance inst = make_instance(cfg, 17);
  SolveOutput probe = solve_ap(inst);
  REQUIRE(probe.ok());

  PrefixState state(inst, probe.diagnostics.row_order,
                    probe.diagnostics.col_order, probe.diagnostics.l1);
  for (int r = 0; r < inst.n(); ++r) {
    DualExtension ext = extend_duals(state, inst);
    double u_new = 0.0, v_new = 0.0;
    if (ext.ok()) {
      u_new = ext.u_new;
      v_new = ext.v_new;
      double row_min = inf;
      for (int m : state.row_arc_slots(r)) {
        if (m > r) break;
        double dv = m == r ? v_new : state.col_dual(m);
        row_min = std::min(
            row_min, inst.cost(state.row_at(r), state.col_at(m)) - u_new - dv);
      }
      CHECK(row_min == doctest::Approx(0.0).epsilon(1e-12));
    } else {
      REQUIRE(ext.status == DualExtension::Status::empty_row_set);
      double diag = inst.cost(state.row_at(r), state.col_at(r));
      REQUIRE(diag < inf);
      double col_in_min = inf;
      for (int oi : inst.digraph().in_neighbors(state.col_at(r))) {
        int s = state.row_slot_of(oi);
        if (s < r)
          col_in_min = std::min(
              col_in_min, inst.cost(oi, state.col_at(r)) - state.row_dual(s));
      }
      v_new = std::min(col_in_min, diag);
      u_new = diag - v_new;
    }
    DijkstraResult dij = dijkstra_contracted(state, inst, u_new, v_new);
    REQUIRE(dij.reached);
    augment(state, dij, u_new, v_new);
  }
  CHECK(state.size() == inst.n());
  CHECK(state.check_prefix().empty());
}

TEST_CASE("settled distances are nondecreasing and the identity holds") {
  InstanceConfig cfg;
  cfg.n = 30;
  cfg.alpha = 0.5;
  cfg.eps = 0.25;
  cfg.family = Family::clustered_adversarial;
  Instance inst = make_instance(cfg, 23);
  SolveOutput probe = solve_ap(inst);
  REQUIRE(probe.ok());

  PrefixState state(inst, probe.diagnostics.row_order,
                    probe.diagnostics.col_order, probe.diagnostics.l1);
  for (int r = 0; r < inst.n(); ++r) {
    DualExtension ext = extend_duals(state, inst);
    double u_new, v_new;
    if (ext.ok()) {
      u_new = ext.u_new;
      v_new = ext.v_new;
    } else {
      // first insertion (or isolated row): match the pair directly
      REQUIRE(ext.status == DualExtension::Status::empty_row_set);
      double diag = inst.cost(state.row_at(r), state.col_at(r));
      REQUIRE(diag < inf);
      double col_in_min = inf;
      for (int oi : inst.digraph().in_neighbors(state.col_at(r))) {
        int s = state.row_slot_of(oi);
        if (s < r)
          col_in_min = std::min(
              col_in_min, inst.cost(oi, state.col_at(r)) - state.row_dual(s));
      }
      v_new = std::min(col_in_min, diag);
      u_new = diag - v_new;
    }
    DijkstraResult dij = dijkstra_contracted(state, inst, u_new, v_new);
    REQUIRE(dij.reached);
    double prev = 0.0;
    for (int slot : dij.settle_order) {
      CHECK(dij.dist[slot] >= prev - 1e-12);
      prev = dij.dist[slot];
    }
    CHECK(dij.target_dist >= prev - 1e-12);
    CHECK(dij.target_dist >= -1e-12);

    // the rewiring's true cost change is pinned by the reduced path length
    double value_before = state.value();
    AugmentEvent ev = augment(state, dij, u_new, v_new);
    double direct = 0.0;
    for (std::size_t t = 0; t < ev.path_rows.size(); ++t)
      direct += inst.cost(ev.path_rows[t], ev.path_cols[t]);
    for (std::size_t t = 0; t + 1 < ev.path_rows.size(); ++t)
      direct -= inst.cost(ev.path_rows[t + 1], ev.path_cols[t]);
    CHECK(state.value() - value_before ==
          doctest::Approx(direct).epsilon(1e-9));
    CHECK(state.value() - value_before ==
          doctest::Approx(dij.target_dist + u_new + v_new).epsilon(1e-9));
  }
}

TEST_CASE("each augmentation grows the matching by exactly one") {
  Instance inst = small_instance(7, 99);
  SolverOptions opts;
  opts.record_events = true;
  SolveOutput out = solve_ap(inst, opts);
  REQUIRE(out.ok());
  REQUIRE(out.diagnostics.events.size() == 7);
  for (const AugmentEvent& ev : out.diagnostics.events) {
    CHECK(ev.path_rows.size() == ev.path_cols.size());
    CHECK(ev.path_reduced_cost >= 0.0);
    std::set<int> rows(ev.path_rows.begin(), ev.path_rows.end());
    std::set<int> cols(ev.path_cols.begin(), ev.path_cols.end());
    CHECK(rows.size() == ev.path_rows.size());
    CHECK(cols.size() == ev.path_cols.size());
  }
}

TEST_CASE("prefix optimality is maintained at every step of a 60-row solve") {
  InstanceConfig cfg;
  cfg.n = 60;
  cfg.alpha = 0.35;
  cfg.eps = 0.2;
  cfg.family = Family::random_regularish;
  Instance inst = make_instance(cfg, 31);
  SolverOptions opts;
  opts.prefix_verify_stride = 1;  // throws internally if optimality is lost
  SolveOutput out = solve_ap(inst, opts);
  REQUIRE(out.ok());
  CHECK(verify_optimal(inst, out.solution).pass);
}

TEST_CASE("natural insertion order reports infeasibility with a witness") {
  // all off-diagonal arcs exist, so the very first prefix pair (0,0) is a
  // self-loop and the natural order gets stuck immediately
  Instance inst = matrix_instance(
      {{inf, 1.0, 1.0}, {1.0, inf, 1.0}, {1.0, 1.0, inf}});
  SolverOptions opts;
  opts.insertion = InsertionPolicy::natural;
  SolveOutput out = solve_ap(inst, opts);
  CHECK_FALSE(out.ok());
  CHECK(out.infeasible.r == 0);
  CHECK(out.infeasible.reachable_rows == std::vector<int>{0});
  CHECK(out.infeasible.reachable_cols.empty());

  SolveOutput guided = solve_ap(inst);
  REQUIRE(guided.ok());
  CHECK(guided.solution.value == doctest::Approx(3.0));
}

TEST_CASE("an instance with no perfect matching is infeasible with a Hall set") {
  // rows 0 and 1 both reach only column 2
  Instance inst = matrix_instance({{inf, inf, 1.0},
                                   {inf, inf, 1.0},
                                   {1.0, 1.0, inf}});
  SolveOutput out = solve_ap(inst);
  CHECK_FALSE(out.ok());
  CHECK(out.infeasible.r == 2);
  CHECK(out.infeasible.reachable_rows.size() >
        out.infeasible.reachable_cols.size());
}

TEST_CASE("value is invariant under the insertion order") {
  InstanceConfig cfg;
  cfg.n = 16;
  cfg.alpha = 0.6;
  cfg.eps = 0.2;
  cfg.family = Family::complete;
  Instance inst = make_instance(cfg, 12);
  SolveOutput guided = solve_ap(inst);
  REQUIRE(guided.ok());

  const int n = inst.n();
  for (int shift : {1, 3, 7}) {
    SolverOptions opts;
    opts.insertion = InsertionPolicy::given;
    opts.row_order.resize(n);
    opts.col_order.resize(n);
    for (int k = 0; k < n; ++k) {
      opts.row_order[k] = k;
      opts.col_order[k] = (k + shift) % n;  // never the self-loop diagonal
    }
    SolveOutput out = solve_ap(inst, opts);
    REQUIRE(out.ok());
    CHECK(std::abs(out.solution.value - guided.solution.value) <= 1e-9);
    CHECK(verify_optimal(inst, out.solution).pass);
  }
}

// Independent replay of the short-cycle accounting: maintain the partial
// permutation as a plain map, re-deriving every deletion/insertion from the
// event paths, and scan for the closed cycle length directly.
namespace {

struct CycleReplay {
  std::map<int, int> succ;
  std::set<int> charged;
  long long l1;

  explicit CycleReplay(long long l1_bound) : l1(l1_bound) {}

  int apply(const AugmentEvent& ev) {
    int created = 0;
    const std::size_t s = ev.path_rows.size();
    for (std::size_t t = 0; t < s; ++t) {
      if (t + 1 < s) succ.erase(ev.path_rows[t + 1]);
      int x = ev.path_rows[t];
      int y = ev.path_cols[t];
      // walk successors; cycle closed by (x, y) has length steps+1
      int z = y;
      bool short_cycle = false;
      for (long long steps = 0; steps < l1; ++steps) {
        if (z == x) {
          short_cycle = true;
          break;
        }
        auto it = succ.find(z);
        if (it == succ.end()) break;
        z = it->second;
      }
      if (short_cycle && !charged.count(x)) {
        charged.insert(x);
        ++created;
      }
      succ[x] = y;
    }
    return created;
  }
};

}  // namespace

TEST_CASE("short-cycle counts match an independent replay") {
  for (std::uint64_t seed : {2ULL, 5ULL, 8ULL, 13ULL}) {
    InstanceConfig cfg;
    cfg.n = 40;
    cfg.alpha = 0.4;
    cfg.eps = 0.25;
    cfg.family = seed % 2 ? Family::random_regularish : Family::complete;
    Instance inst = make_instance(cfg, seed);
    SolverOptions opts;
    opts.record_events = true;
    opts.l1_override = 6;
    SolveOutput out = solve_ap(inst, opts);
    REQUIRE(out.ok());

    CycleReplay replay(6);
    long long total = 0;
    for (const AugmentEvent& ev : out.diagnostics.events) {
      CHECK(replay.apply(ev) == ev.short_cycles_created);
      total += ev.short_cycles_created;
    }
    CHECK(total == out.diagnostics.short_cycle_total);
    CHECK(total <= inst.n());  // each vertex is charged at most once
  }
}

TEST_CASE("a forced transposition registers one short cycle") {
  // insertion pairs (0, col 1), (1, col 0), (2, col 2): the second step can
  // only take arc (1, 0), closing the 2-cycle 0 -> 1 -> 0; the last step
  // reroutes through it, and the 3-cycle it closes is not re-charged.
  std::vector<std::vector<double>> costs(3, std::vector<double>(3, inf));
  costs[0][1] = 1.0;
  costs[1][0] = 1.0;
  costs[1][2] = 1.0;
  costs[2][0] = 1.0;
  costs[0][2] = 5.0;
  costs[2][1] = 5.0;
  Instance inst = matrix_instance(costs);

  SolverOptions opts;
  opts.insertion = InsertionPolicy::given;
  opts.row_order = {0, 1, 2};
  opts.col_order = {1, 0, 2};
  opts.record_events = true;
  opts.l1_override = 3;
  SolveOutput out = solve_ap(inst, opts);
  REQUIRE(out.ok());
  CHECK(out.solution.value == doctest::Approx(3.0));
  REQUIRE(out.diagnostics.events.size() == 3);
  CHECK(out.diagnostics.events[0].short_cycles_created == 0);
  CHECK(out.diagnostics.events[1].short_cycles_created == 1);
  CHECK(out.diagnostics.events[2].short_cycles_created == 0);
  CHECK(out.diagnostics.short_cycle_total == 1);
}

TEST_CASE("augmentations with no closed cycle report zero") {
  // two rows, forced direct matches, no cycle can close on 2 vertices with
  // l1 = 1
  Instance inst = matrix_instance({{inf, 1.0}, {1.0, inf}});
  SolverOptions opts;
  opts.record_events = true;
  opts.l1_override = 1;
  SolveOutput out = solve_ap(inst, opts);
  REQUIRE(out.ok());
  CHECK(out.diagnostics.short_cycle_total == 0);
}

TEST_CASE("trace stream emits one JSON line per augmentation") {
  Instance inst = small_instance(9, 3);
  std::ostringstream trace;
  SolverOptions opts;
  opts.trace = &trace;
  SolveOutput out = solve_ap(inst, opts);
  REQUIRE(out.ok());
  int lines = 0;
  std::istringstream in(trace.str());
  std::string line;
  while (std::getline(in, line)) {
    CHECK(line.front() == '{');
    CHECK(line.find("\"path_reduced_cost\":") != std::string::npos);
    ++lines;
  }
  CHECK(lines == 9);
}
