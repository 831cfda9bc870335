#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "patchkit/assignment.hpp"
#include "patchkit/instance.hpp"

namespace patchkit {

// One row/column insertion step: the shortest augmenting path found, the
// duals assigned to the inserted pair, and how many short cycles the
// rewiring closed.
struct AugmentEvent {
  int r = 0;  // prefix size before this augmentation
  std::vector<int> path_rows;  // x_1 .. x_s, original row vertices
  std::vector<int> path_cols;  // y_1 .. y_s, original column vertices
  double path_reduced_cost = 0.0;
  double u_new = 0.0;
  double v_new = 0.0;
  int short_cycles_created = 0;
};

struct SolverDiagnostics {
  long long final_cycle_count = 0;
  double max_matched_cost = 0.0;
  long long short_cycle_total = 0;  // sum of per-augmentation counts
  long long l1 = 0;                 // short-cycle length bound used
  std::vector<int> row_order;
  std::vector<int> col_order;
  std::vector<AugmentEvent> events;  // only kept when record_events is set
};

struct InfeasibleInfo {
  int r = -1;  // insertion step that could not be completed
  std::vector<int> reachable_rows;  // original row vertices reached
  std::vector<int> reachable_cols;  // original column vertices reached
};

// How rows and columns are paired into the insertion sequence. The optimal
// value is invariant to the order; feasibility of the intermediate prefix
// problems is not. matching_guided seeds the order from a maximum matching
// so every prefix is solvable whenever the instance is.
enum class InsertionPolicy { matching_guided, natural, given };

struct SolverOptions {
  InsertionPolicy insertion = InsertionPolicy::matching_guided;
  std::vector<int> row_order;  // used when insertion == given
  std::vector<int> col_order;
  bool record_events = false;
  int prefix_verify_stride = 0;  // > 0: re-check prefix optimality every k steps
  long long l1_override = -1;    // short-cycle bound; < 0 derives from config
  std::ostream* trace = nullptr; // JSON lines, one AugmentEvent per line
};

enum class SolveStatus { optimal, infeasible };

struct SolveOutput {
  SolveStatus status = SolveStatus::infeasible;
  ApSolution solution;
  SolverDiagnostics diagnostics;
  InfeasibleInfo infeasible;
  bool ok() const { return status == SolveStatus::optimal; }
};

// Incremental solver state. Rows and columns are addressed by insertion
// slot: slot k holds original row row_order[k] and column col_order[k].
// After k insertions, slots [0, k) carry a perfect matching that is optimal
// for the induced sub-instance, with feasible complementary-slack duals.
class PrefixState {
 public:
  PrefixState(const Instance& inst, std::vector<int> row_order,
              std::vector<int> col_order, long long l1);

  const Instance& instance() const { return *inst_; }
  int size() const { return r_; }
  int slots() const { return n_; }
  long long l1() const { return l1_; }

  int row_at(int slot) const { return row_at_[slot]; }
  int col_at(int slot) const { return col_at_[slot]; }
  int row_slot_of(int original_row) const { return row_slot_[original_row]; }
  int col_slot_of(int original_col) const { return col_slot_[original_col]; }
  int match_row(int col_slot) const { return match_row_[col_slot]; }
  int match_col(int row_slot) const { return match_col_[row_slot]; }
  double row_dual(int slot) const { return u_[slot]; }
  double col_dual(int slot) const { return v_[slot]; }
  double value() const { return value_; }
  long long short_cycle_total() const { return short_cycle_total_; }

  // Columns (as slots, ascending) adjacent to the row in a given slot.
  const std::vector<int>& row_arc_slots(int row_slot) const {
    return row_arcs_[row_at_[row_slot]];
  }

  // Test hook: installs a matching plus duals for the first r slots without
  // solving. Caller is responsible for their optimality.
  void force_prefix(const std::vector<int>& match_col,
                    const std::vector<double>& u,
                    const std::vector<double>& v);

  // Empty-string means the first r slots satisfy feasibility and
  // complementary slackness; otherwise a description of the violation.
  std::string check_prefix() const;

  ApSolution extract_solution() const;
  long long count_cycles() const;
  double max_matched_cost() const;

 private:
  friend AugmentEvent augment(PrefixState& state,
                              const struct DijkstraResult& dijkstra,
                              double u_new, double v_new);
  const Instance* inst_;
  int n_ = 0;
  int r_ = 0;
  long long l1_ = 1;
  std::vector<int> row_at_, col_at_;    // slot -> original vertex
  std::vector<int> row_slot_, col_slot_;  // original vertex -> slot
  std::vector<std::vector<int>> row_arcs_;  // original row -> arc column slots
  std::vector<int> match_row_, match_col_;  // slot-indexed, -1 if unmatched
  std::vector<double> u_, v_;
  double value_ = 0.0;
  // partial permutation in original vertex space, for cycle accounting
  std::vector<int> succ_, pred_;
  std::vector<char> virgin_used_;
  long long short_cycle_total_ = 0;
};

// Dual extension for the incoming slot r = state.size().
struct DualExtension {
  enum class Status {
    ok,
    empty_row_set,  // inserted row has no arc into the prefix columns
    empty_col_set,  // inserted column has no arc from the prefix rows nor
                    // from the inserted row
  };
  Status status = Status::ok;
  double u_new = 0.0;
  double v_new = 0.0;
  bool ok() const { return status == Status::ok; }
};

// u_new = min over prefix columns j of C(row_r, col_j) - v_j;
// v_new = min(C(row_r, col_r) - u_new, min over prefix rows i of
// C(row_i, col_r) - u_i). Requires at least one arc for each min.
DualExtension extend_duals(const PrefixState& state, const Instance& inst);

struct DijkstraResult {
  bool reached = false;
  double target_dist = 0.0;
  std::vector<double> dist;        // per row slot 0..r; unreached = +inf
  std::vector<int> parent_row;     // predecessor row slot on shortest path
  std::vector<int> parent_col;     // column slot used to reach the row
  int target_parent_row = -1;
  int target_parent_col = -1;
  std::vector<int> settle_order;   // row slots in settlement order
};

// Shortest augmenting path search on the matching-contracted digraph whose
// vertices are the row slots 0..r; matched pairs behave as a single node.
// u_new/v_new are the duals assigned to the inserted slot (extend_duals).
// Settled distances are nondecreasing; stops once the inserted column is
// settled.
DijkstraResult dijkstra_contracted(const PrefixState& state,
                                   const Instance& inst, double u_new,
                                   double v_new);

// Applies the augmenting path from a Dijkstra run: reassigns matched
// columns along the path, rescales duals so all reduced costs stay
// nonnegative with matched arcs tight, and counts newly closed short
// cycles. Advances the state by one slot.
AugmentEvent augment(PrefixState& state, const DijkstraResult& dijkstra,
                     double u_new, double v_new);

SolveOutput solve_ap(const Instance& inst, const SolverOptions& opts = {});

}  // namespace patchkit
