#include "patchkit/oracles.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace patchkit::oracles {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::vector<double> dense_costs(const Instance& inst) {
  const int n = inst.n();
  std::vector<double> costs(static_cast<std::size_t>(n) * n, kInf);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      costs[static_cast<std::size_t>(i) * n + j] = inst.cost(i, j);
  return costs;
}

BruteApResult brute_ap(const std::vector<double>& costs, int n) {
  if (n < 1 || n > kMaxBruteApN)
    throw std::invalid_argument("brute_ap handles 1 <= n <= 9 only");
  if (costs.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("cost matrix must be n x n");

  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  BruteApResult best;
  best.value = kInf;
  do {
    double total = 0.0;
    for (int i = 0; i < n && total < kInf; ++i)
      total += costs[static_cast<std::size_t>(i) * n + perm[i]];
    // strict improvement keeps the lexicographically smallest argmin
    if (total < best.value) {
      best.value = total;
      best.sigma = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (best.value == kInf) best.sigma.clear();
  return best;
}

BruteApResult brute_ap(const Instance& inst) {
  return brute_ap(dense_costs(inst), inst.n());
}

AtspResult held_karp_atsp(const std::vector<double>& costs, int n) {
  if (n < 2 || n > kMaxHeldKarpN)
    throw std::invalid_argument("held_karp_atsp handles 2 <= n <= 15 only");
  if (costs.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("cost matrix must be n x n");

  auto c = [&](int i, int j) {
    return costs[static_cast<std::size_t>(i) * n + j];
  };

  const std::size_t masks = 1ULL << n;
  // dp[mask][j]: cheapest path from 0 visiting exactly `mask`, ending at j
  std::vector<double> dp(masks * n, kInf);
  std::vector<std::int16_t> parent(masks * n, -1);
  dp[(1ULL << 0) * n + 0] = 0.0;

  for (std::size_t mask = 1; mask < masks; ++mask) {
    if (!(mask & 1)) continue;  // every path starts at vertex 0
    for (int j = 0; j < n; ++j) {
      if (!(mask & (1ULL << j))) continue;
      const double base = dp[mask * n + j];
      if (base == kInf) continue;
      for (int t = 0; t < n; ++t) {
        if (mask & (1ULL << t)) continue;
        const double step = c(j, t);
        if (step == kInf) continue;
        const std::size_t next = mask | (1ULL << t);
        if (base + step < dp[next * n + t]) {
          dp[next * n + t] = base + step;
          parent[next * n + t] = static_cast<std::int16_t>(j);
        }
      }
    }
  }

  const std::size_t full = masks - 1;
  AtspResult best;
  best.value = kInf;
  int last = -1;
  for (int j = 1; j < n; ++j) {
    const double closing = c(j, 0);
    if (dp[full * n + j] == kInf || closing == kInf) continue;
    const double total = dp[full * n + j] + closing;
    if (total < best.value) {
      best.value = total;
      last = j;
    }
  }
  if (last < 0) return best;

  std::vector<int> reversed;
  std::size_t mask = full;
  int j = last;
  while (j != -1) {
    reversed.push_back(j);
    int prev = parent[mask * n + j];
    mask &= ~(1ULL << j);
    j = prev;
  }
  best.tour.assign(reversed.rbegin(), reversed.rend());
  return best;
}

AtspResult held_karp_atsp(const Instance& inst) {
  return held_karp_atsp(dense_costs(inst), inst.n());
}

AtspResult brute_atsp(const std::vector<double>& costs, int n) {
  if (n < 2 || n > kMaxBruteAtspN)
    throw std::invalid_argument("brute_atsp handles 2 <= n <= 9 only");
  if (costs.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("cost matrix must be n x n");

  auto c = [&](int i, int j) {
    return costs[static_cast<std::size_t>(i) * n + j];
  };

  std::vector<int> rest(n - 1);
  std::iota(rest.begin(), rest.end(), 1);
  AtspResult best;
  best.value = kInf;
  do {
    double total = c(rest.back(), 0);
    int at = 0;
    for (int next : rest) {
      if (total == kInf) break;
      total += c(at, next);
      at = next;
    }
    if (total < best.value) {
      best.value = total;
      best.tour.assign(1, 0);
      best.tour.insert(best.tour.end(), rest.begin(), rest.end());
    }
  } while (std::next_permutation(rest.begin(), rest.end()));
  return best;
}

std::optional<PatchMove> exhaustive_best_patch(const Instance& inst,
                                               const CycleCover& cover) {
  if (cover.cycle_count() < 2)
    throw std::invalid_argument("patching needs at least two cycles");

  struct Arc {
    int cycle, from, to;
  };
  std::vector<Arc> arcs;
  for (std::size_t c = 0; c < cover.cycles.size(); ++c) {
    const auto& cyc = cover.cycles[c];
    for (std::size_t p = 0; p < cyc.size(); ++p)
      arcs.push_back({static_cast<int>(c), cyc[p], cyc[(p + 1) % cyc.size()]});
  }

  bool found = false;
  PatchMove best;
  for (const Arc& e : arcs) {
    for (const Arc& f : arcs) {
      if (e.cycle >= f.cycle) continue;
      if (!inst.digraph().has_arc(f.from, e.to)) continue;
      if (!inst.digraph().has_arc(e.from, f.to)) continue;
      const double inserted = inst.cost(f.from, e.to) + inst.cost(e.from, f.to);
      const double delta =
          inserted - inst.cost(e.from, e.to) - inst.cost(f.from, f.to);
      const bool better =
          !found || delta < best.delta ||
          (delta == best.delta &&
           (e.from < best.x || (e.from == best.x && f.from < best.u)));
      if (better) {
        found = true;
        best = PatchMove{e.from, e.to, f.from, f.to, delta, inserted};
      }
    }
  }
  if (!found) return std::nullopt;
  return best;
}

}  // namespace patchkit::oracles
