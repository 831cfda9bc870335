#include "patchkit/ssp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <utility>

#include "patchkit/rng.hpp"

namespace patchkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_permutation_of_n(const std::vector<int>& p, int n) {
  if (static_cast<int>(p.size()) != n) return false;
  std::vector<char> seen(n, 0);
  for (int x : p) {
    if (x < 0 || x >= n || seen[x]) return false;
    seen[x] = 1;
  }
  return true;
}

// Hopcroft-Karp maximum matching on the row -> column arc structure. Used
// to derive an insertion order under which every prefix problem stays
// feasible whenever the instance itself is.
class BipartiteMatcher {
 public:
  explicit BipartiteMatcher(const Digraph& g)
      : n_(g.n()), g_(g), match_l_(n_, -1), match_r_(n_, -1) {}

  int solve() {
    int size = 0;
    for (int i = 0; i < n_; ++i) {
      for (int j : g_.out_neighbors(i)) {
        if (match_r_[j] < 0) {
          match_l_[i] = j;
          match_r_[j] = i;
          ++size;
          break;
        }
      }
    }
    while (bfs()) {
      for (int i = 0; i < n_; ++i)
        if (match_l_[i] < 0 && dfs(i)) ++size;
    }
    return size;
  }

  const std::vector<int>& left_match() const { return match_l_; }

  // Alternating reachability from the lowest exposed row; when the matching
  // is deficient this is a Hall violator (|rows| > |cols|).
  void witness(std::vector<int>& rows, std::vector<int>& cols) const {
    rows.clear();
    cols.clear();
    int start = -1;
    for (int i = 0; i < n_; ++i)
      if (match_l_[i] < 0) {
        start = i;
        break;
      }
    if (start < 0) return;
    std::vector<char> row_seen(n_, 0), col_seen(n_, 0);
    std::queue<int> q;
    row_seen[start] = 1;
    q.push(start);
    while (!q.empty()) {
      int i = q.front();
      q.pop();
      rows.push_back(i);
      for (int j : g_.out_neighbors(i)) {
        if (col_seen[j]) continue;
        col_seen[j] = 1;
        cols.push_back(j);
        int i2 = match_r_[j];
        if (i2 >= 0 && !row_seen[i2]) {
          row_seen[i2] = 1;
          q.push(i2);
        }
      }
    }
    std::sort(rows.begin(), rows.end());
    std::sort(cols.begin(), cols.end());
  }

 private:
  bool bfs() {
    std::queue<int> q;
    dist_.assign(n_, -1);
    for (int i = 0; i < n_; ++i)
      if (match_l_[i] < 0) {
        dist_[i] = 0;
        q.push(i);
      }
    bool found = false;
    while (!q.empty()) {
      int i = q.front();
      q.pop();
      for (int j : g_.out_neighbors(i)) {
        int i2 = match_r_[j];
        if (i2 < 0)
          found = true;
        else if (dist_[i2] < 0) {
          dist_[i2] = dist_[i] + 1;
          q.push(i2);
        }
      }
    }
    return found;
  }

  bool dfs(int i) {
    for (int j : g_.out_neighbors(i)) {
      int i2 = match_r_[j];
      if (i2 < 0 || (dist_[i2] == dist_[i] + 1 && dfs(i2))) {
        match_l_[i] = j;
        match_r_[j] = i;
        return true;
      }
    }
    dist_[i] = -1;
    return false;
  }

  int n_;
  const Digraph& g_;
  std::vector<int> match_l_, match_r_, dist_;
};

// Pieces of the dual extension formula, kept separate so the solver can
// fall back gracefully when the inserted row only touches its own column.
struct ExtensionParts {
  double row_min = kInf;     // min over prefix columns of C(row_r, .) - v
  double col_in_min = kInf;  // min over prefix rows of C(., col_r) - u
  double diag = kInf;        // C(row_r, col_r)
};

ExtensionParts extension_parts(const PrefixState& state) {
  const Instance& inst = state.instance();
  const int r = state.size();
  const int orow = state.row_at(r);
  const int ocol = state.col_at(r);
  ExtensionParts parts;
  for (int m : state.row_arc_slots(r)) {
    if (m >= r) break;
    double c = inst.cost(orow, state.col_at(m)) - state.col_dual(m);
    parts.row_min = std::min(parts.row_min, c);
  }
  parts.diag = inst.cost(orow, ocol);
  for (int oi : inst.digraph().in_neighbors(ocol)) {
    int s = state.row_slot_of(oi);
    if (s < r)
      parts.col_in_min =
          std::min(parts.col_in_min, inst.cost(oi, ocol) - state.row_dual(s));
  }
  return parts;
}

}  // namespace

// -- PrefixState --------------------------------------------------------------

PrefixState::PrefixState(const Instance& inst, std::vector<int> row_order,
                         std::vector<int> col_order, long long l1)
    : inst_(&inst),
      n_(inst.n()),
      l1_(std::max<long long>(1, l1)),
      row_at_(std::move(row_order)),
      col_at_(std::move(col_order)) {
  if (!is_permutation_of_n(row_at_, n_) || !is_permutation_of_n(col_at_, n_))
    throw std::invalid_argument("insertion orders must be permutations of [n]");
  row_slot_.assign(n_, -1);
  col_slot_.assign(n_, -1);
  for (int k = 0; k < n_; ++k) {
    row_slot_[row_at_[k]] = k;
    col_slot_[col_at_[k]] = k;
  }
  row_arcs_.resize(n_);
  for (int v = 0; v < n_; ++v) {
    const auto& nb = inst.digraph().out_neighbors(v);
    row_arcs_[v].reserve(nb.size());
    for (int w : nb) row_arcs_[v].push_back(col_slot_[w]);
    std::sort(row_arcs_[v].begin(), row_arcs_[v].end());
  }
  match_row_.assign(n_, -1);
  match_col_.assign(n_, -1);
  succ_.assign(n_, -1);
  pred_.assign(n_, -1);
  virgin_used_.assign(n_, 0);
}

void PrefixState::force_prefix(const std::vector<int>& match_col,
                               const std::vector<double>& u,
                               const std::vector<double>& v) {
  const int r = static_cast<int>(match_col.size());
  if (u.size() != match_col.size() || v.size() != match_col.size())
    throw std::invalid_argument("force_prefix arrays must share one length");
  std::fill(match_row_.begin(), match_row_.end(), -1);
  std::fill(match_col_.begin(), match_col_.end(), -1);
  std::fill(succ_.begin(), succ_.end(), -1);
  std::fill(pred_.begin(), pred_.end(), -1);
  u_ = u;
  v_ = v;
  value_ = 0.0;
  for (int i = 0; i < r; ++i) {
    int m = match_col[i];
    if (m < 0 || m >= r || match_row_[m] >= 0)
      throw std::invalid_argument("force_prefix matching is not a bijection");
    match_col_[i] = m;
    match_row_[m] = i;
    succ_[row_at_[i]] = col_at_[m];
    pred_[col_at_[m]] = row_at_[i];
    value_ += inst_->cost(row_at_[i], col_at_[m]);
  }
  r_ = r;
}

std::string PrefixState::check_prefix() const {
  char buf[160];
  for (int i = 0; i < r_; ++i) {
    const int orow = row_at_[i];
    for (int m : row_arcs_[orow]) {
      if (m >= r_) break;
      double rc = inst_->cost(orow, col_at_[m]) - u_[i] - v_[m];
      if (rc < -kOptimalityTol) {
        std::snprintf(buf, sizeof(buf),
                      "negative reduced cost %.3e at slots (%d,%d)", rc, i, m);
        return buf;
      }
    }
    int m = match_col_[i];
    if (m < 0) return "prefix row left unmatched";
    double rc = inst_->cost(orow, col_at_[m]) - u_[i] - v_[m];
    if (std::abs(rc) > kOptimalityTol) {
      std::snprintf(buf, sizeof(buf),
                    "matched arc not tight (%.3e) at slots (%d,%d)", rc, i, m);
      return buf;
    }
  }
  double matched = 0.0;
  for (int i = 0; i < r_; ++i)
    matched += inst_->cost(row_at_[i], col_at_[match_col_[i]]);
  if (std::abs(matched - value_) > kOptimalityTol * std::max(1, r_)) {
    std::snprintf(buf, sizeof(buf), "tracked value drifted by %.3e",
                  matched - value_);
    return buf;
  }
  return {};
}

ApSolution PrefixState::extract_solution() const {
  if (r_ != n_) throw std::logic_error("solution requested before completion");
  ApSolution sol;
  sol.sigma.assign(n_, -1);
  sol.u.assign(n_, 0.0);
  sol.v.assign(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    sol.sigma[row_at_[i]] = col_at_[match_col_[i]];
    sol.u[row_at_[i]] = u_[i];
    sol.v[col_at_[i]] = v_[i];
  }
  sol.value = 0.0;
  for (int v = 0; v < n_; ++v) sol.value += inst_->cost(v, sol.sigma[v]);
  return sol;
}

long long PrefixState::count_cycles() const {
  long long cycles = 0;
  std::vector<char> seen(n_, 0);
  for (int v = 0; v < n_; ++v) {
    if (seen[v] || succ_[v] < 0) continue;
    int z = v;
    while (z >= 0 && !seen[z]) {
      seen[z] = 1;
      z = succ_[z];
    }
    if (z == v || (z >= 0 && seen[z])) ++cycles;  // closed walks only
  }
  return cycles;
}

double PrefixState::max_matched_cost() const {
  double best = 0.0;
  for (int v = 0; v < n_; ++v)
    if (succ_[v] >= 0) best = std::max(best, inst_->cost(v, succ_[v]));
  return best;
}

// -- extend_duals -------------------------------------------------------------

DualExtension extend_duals(const PrefixState& state, const Instance& inst) {
  if (&inst != &state.instance())
    throw std::invalid_argument("state was built for a different instance");
  ExtensionParts parts = extension_parts(state);
  DualExtension ext;
  if (parts.row_min == kInf) {
    ext.status = DualExtension::Status::empty_row_set;
    return ext;
  }
  if (parts.diag == kInf && parts.col_in_min == kInf) {
    ext.status = DualExtension::Status::empty_col_set;
    return ext;
  }
  ext.u_new = parts.row_min;
  ext.v_new = std::min(parts.diag - ext.u_new, parts.col_in_min);
  return ext;
}

// -- dijkstra_contracted --------------------------------------------------------

DijkstraResult dijkstra_contracted(const PrefixState& state,
                                   const Instance& inst, double u_new,
                                   double v_new) {
  if (&inst != &state.instance())
    throw std::invalid_argument("state was built for a different instance");
  const int r = state.size();
  DijkstraResult res;
  res.dist.assign(r + 1, kInf);
  res.parent_row.assign(r + 1, -1);
  res.parent_col.assign(r + 1, -1);
  res.settle_order.reserve(r + 1);

  const int target = r + 1;  // virtual node standing in for the new column
  double target_dist = kInf;
  int target_parent_row = -1;
  std::vector<char> settled(r + 2, 0);

  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  res.dist[r] = 0.0;
  heap.emplace(0.0, r);
  double last_settled = 0.0;

  auto node_dist = [&](int node) {
    return node == target ? target_dist : res.dist[node];
  };

  while (!heap.empty()) {
    auto [d, x] = heap.top();
    heap.pop();
    if (settled[x] || d > node_dist(x)) continue;
    settled[x] = 1;
    if (d < last_settled - 1e-12)
      throw std::logic_error("settled distances must be nondecreasing");
    last_settled = d;
    if (x == target) {
      res.reached = true;
      break;
    }
    res.settle_order.push_back(x);

    const int orow = state.row_at(x);
    const double du = (x == r) ? u_new : state.row_dual(x);
    const int own_col = (x == r) ? -1 : state.match_col(x);
    for (int m : state.row_arc_slots(x)) {
      if (m > r) break;
      if (m == own_col) continue;  // contracted matched pair, a self-loop
      const double dv = (m == r) ? v_new : state.col_dual(m);
      double w = inst.cost(orow, state.col_at(m)) - du - dv;
      if (w < 0) {
        if (w < -1e-6)
          throw std::logic_error("negative reduced cost entering Dijkstra");
        w = 0.0;  // floating noise only
      }
      const int y = (m == r) ? target : state.match_row(m);
      const double nd = d + w;
      if (nd < node_dist(y)) {
        if (y == target) {
          target_dist = nd;
          target_parent_row = x;
        } else {
          res.dist[y] = nd;
          res.parent_row[y] = x;
          res.parent_col[y] = m;
        }
        heap.emplace(nd, y);
      }
    }
  }

  res.target_dist = target_dist;
  res.target_parent_row = target_parent_row;
  res.target_parent_col = r;
  return res;
}

// -- augment --------------------------------------------------------------------

namespace {

// Walking successors from y, is x reached within l1 - 1 steps? If so the
// new arc (x, y) closes a directed cycle of at most l1 arcs.
bool closes_short_cycle(const std::vector<int>& succ, int x, int y,
                        long long l1) {
  int z = y;
  for (long long steps = 0; steps < l1 && z >= 0; ++steps) {
    if (z == x) return true;  // cycle length = steps + 1 <= l1
    z = succ[z];
  }
  return false;
}

}  // namespace

AugmentEvent augment(PrefixState& state, const DijkstraResult& dijkstra,
                     double u_new, double v_new) {
  if (!dijkstra.reached)
    throw std::invalid_argument("augment requires a reached target");
  const int r = state.size();
  const double dstar = dijkstra.target_dist;

  // Path row slots source..last plus the column slot each of them takes.
  std::vector<int> rows_rev;
  rows_rev.push_back(dijkstra.target_parent_row);
  while (rows_rev.back() != r) {
    int prev = dijkstra.parent_row[rows_rev.back()];
    if (prev < 0) throw std::logic_error("broken shortest-path parents");
    rows_rev.push_back(prev);
  }
  std::vector<int> path_rows(rows_rev.rbegin(), rows_rev.rend());
  const int k = static_cast<int>(path_rows.size()) - 1;
  std::vector<int> path_cols(k + 1);
  for (int t = 0; t < k; ++t)
    path_cols[t] = dijkstra.parent_col[path_rows[t + 1]];
  path_cols[k] = r;

  // Dual rescale: u_i += d* - min(d_i, d*), v_j += min(d(col j), d*) - d*,
  // where a column inherits the distance of its pre-augment matched row.
  // Keeps every reduced cost nonnegative with shortest-path arcs tight.
  state.u_.push_back(u_new);
  state.v_.push_back(v_new);
  for (int i = 0; i <= r; ++i) {
    double di = std::min(dijkstra.dist[i], dstar);
    state.u_[i] += dstar - di;
  }
  for (int m = 0; m <= r; ++m) {
    double dc = (m == r) ? dstar
                         : std::min(dijkstra.dist[state.match_row_[m]], dstar);
    state.v_[m] += dc - dstar;
  }

  // Rewire the matching along the path, counting short cycles as each arc
  // lands. A released row loses its old arc before that column is reused,
  // and a vertex is charged for at most one short cycle over the solve.
  AugmentEvent event;
  event.r = r;
  event.path_reduced_cost = dstar;
  event.u_new = u_new;
  event.v_new = v_new;
  double added_cost = 0.0, removed_cost = 0.0;
  for (int t = 0; t <= k; ++t) {
    if (t < k) {
      int released = state.row_at_[path_rows[t + 1]];
      int old_col = state.col_at_[path_cols[t]];
      removed_cost += state.inst_->cost(released, old_col);
      state.succ_[released] = -1;
      state.pred_[old_col] = -1;
    }
    int x = state.row_at_[path_rows[t]];
    int y = state.col_at_[path_cols[t]];
    added_cost += state.inst_->cost(x, y);
    if (closes_short_cycle(state.succ_, x, y, state.l1_) &&
        !state.virgin_used_[x]) {
      state.virgin_used_[x] = 1;
      ++event.short_cycles_created;
    }
    state.succ_[x] = y;
    state.pred_[y] = x;
    event.path_rows.push_back(x);
    event.path_cols.push_back(y);
  }
  for (int t = 0; t <= k; ++t) {
    state.match_col_[path_rows[t]] = path_cols[t];
    state.match_row_[path_cols[t]] = path_rows[t];
  }
  state.short_cycle_total_ += event.short_cycles_created;

  // True cost change of the rewiring must equal the reduced path length
  // shifted by the inserted duals, independent of the path taken.
  const double delta = dstar + u_new + v_new;
  if (std::abs((added_cost - removed_cost) - delta) >
      kOptimalityTol * std::max(1, state.n_))
    throw std::logic_error("path cost identity violated during augment");
  state.value_ += delta;
  state.r_ = r + 1;
  return event;
}

// -- solve_ap ---------------------------------------------------------------------

namespace {

void bfs_reachable(const PrefixState& state, std::vector<int>& rows,
                   std::vector<int>& cols) {
  const int r = state.size();
  std::vector<char> row_seen(r + 1, 0), col_seen(r + 1, 0);
  std::queue<int> q;
  row_seen[r] = 1;
  q.push(r);
  rows.clear();
  cols.clear();
  while (!q.empty()) {
    int x = q.front();
    q.pop();
    rows.push_back(state.row_at(x));
    for (int m : state.row_arc_slots(x)) {
      if (m > r) break;
      if (col_seen[m]) continue;
      col_seen[m] = 1;
      cols.push_back(state.col_at(m));
      if (m < r) {
        int y = state.match_row(m);
        if (!row_seen[y]) {
          row_seen[y] = 1;
          q.push(y);
        }
      }
    }
  }
  std::sort(rows.begin(), rows.end());
  std::sort(cols.begin(), cols.end());
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_event_line(std::ostream& out, const AugmentEvent& ev) {
  out << "{\"r\":" << ev.r << ",\"path_rows\":[";
  for (std::size_t i = 0; i < ev.path_rows.size(); ++i)
    out << (i ? "," : "") << ev.path_rows[i];
  out << "],\"path_cols\":[";
  for (std::size_t i = 0; i < ev.path_cols.size(); ++i)
    out << (i ? "," : "") << ev.path_cols[i];
  out << "],\"path_reduced_cost\":" << fmt17(ev.path_reduced_cost)
      << ",\"u_new\":" << fmt17(ev.u_new) << ",\"v_new\":" << fmt17(ev.v_new)
      << ",\"short_cycles_created\":" << ev.short_cycles_created << "}\n";
}

}  // namespace

SolveOutput solve_ap(const Instance& inst, const SolverOptions& opts) {
  const int n = inst.n();
  SolveOutput out;
  if (n < 1) throw std::invalid_argument("instance must have n >= 1");

  long long l1 = opts.l1_override;
  if (l1 < 0) l1 = inst.config().eps > 0 ? l1_cap(n, inst.config().eps) : n;

  std::vector<int> row_order, col_order;
  switch (opts.insertion) {
    case InsertionPolicy::natural: {
      row_order.resize(n);
      col_order.resize(n);
      for (int i = 0; i < n; ++i) row_order[i] = col_order[i] = i;
      break;
    }
    case InsertionPolicy::given: {
      row_order = opts.row_order;
      col_order = opts.col_order;
      break;
    }
    case InsertionPolicy::matching_guided: {
      BipartiteMatcher matcher(inst.digraph());
      int size = matcher.solve();
      if (size < n) {
        out.status = SolveStatus::infeasible;
        out.infeasible.r = size;
        matcher.witness(out.infeasible.reachable_rows,
                        out.infeasible.reachable_cols);
        return out;
      }
      row_order.resize(n);
      for (int i = 0; i < n; ++i) row_order[i] = i;
      rng::Sequence seq(
          rng::stream_key(inst.seed(), rng::Stream::insertion_order));
      rng::shuffle(row_order, seq);
      col_order.resize(n);
      for (int k = 0; k < n; ++k)
        col_order[k] = matcher.left_match()[row_order[k]];
      break;
    }
  }

  PrefixState state(inst, std::move(row_order), std::move(col_order), l1);
  out.diagnostics.l1 = l1;

  for (int r = 0; r < n; ++r) {
    ExtensionParts parts = extension_parts(state);
    double u_new, v_new;
    if (parts.row_min < kInf) {
      u_new = parts.row_min;
      v_new = std::min(parts.diag - u_new, parts.col_in_min);
    } else if (parts.diag < kInf) {
      // The inserted row only reaches its own column inside the prefix;
      // match them directly with tight duals.
      v_new = std::min(parts.col_in_min, parts.diag);
      u_new = parts.diag - v_new;
    } else {
      v_new = kInf;  // row isolated within the prefix
      u_new = kInf;
    }
    if (!(std::isfinite(u_new) && std::isfinite(v_new))) {
      out.status = SolveStatus::infeasible;
      out.infeasible.r = r;
      bfs_reachable(state, out.infeasible.reachable_rows,
                    out.infeasible.reachable_cols);
      return out;
    }

    DijkstraResult dij = dijkstra_contracted(state, inst, u_new, v_new);
    if (!dij.reached) {
      out.status = SolveStatus::infeasible;
      out.infeasible.r = r;
      bfs_reachable(state, out.infeasible.reachable_rows,
                    out.infeasible.reachable_cols);
      return out;
    }

    AugmentEvent event = augment(state, dij, u_new, v_new);
    if (opts.trace) write_event_line(*opts.trace, event);
    if (opts.record_events) out.diagnostics.events.push_back(std::move(event));
    if (opts.prefix_verify_stride > 0 &&
        (r + 1) % opts.prefix_verify_stride == 0) {
      std::string err = state.check_prefix();
      if (!err.empty())
        throw std::logic_error("prefix optimality lost at r=" +
                               std::to_string(r + 1) + ": " + err);
    }
  }

  out.status = SolveStatus::optimal;
  out.solution = state.extract_solution();
  if (std::abs(out.solution.value - state.value()) > kOptimalityTol * n)
    throw std::logic_error("incremental objective drifted from matched sum");
  out.diagnostics.final_cycle_count = state.count_cycles();
  out.diagnostics.max_matched_cost = state.max_matched_cost();
  out.diagnostics.short_cycle_total = state.short_cycle_total();
  out.diagnostics.row_order.resize(n);
  out.diagnostics.col_order.resize(n);
  for (int kslot = 0; kslot < n; ++kslot) {
    out.diagnostics.row_order[kslot] = state.row_at(kslot);
    out.diagnostics.col_order[kslot] = state.col_at(kslot);
  }
  return out;
}

}  // namespace patchkit
