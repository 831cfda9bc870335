#include "patchkit/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace patchkit {

std::vector<int> CycleCover::lengths() const {
  std::vector<int> out;
  out.reserve(cycles.size());
  for (const auto& c : cycles) out.push_back(static_cast<int>(c.size()));
  return out;
}

namespace {

void canonicalize(CycleCover& cover) {
  for (auto& cycle : cover.cycles) {
    auto smallest = std::min_element(cycle.begin(), cycle.end());
    std::rotate(cycle.begin(), smallest, cycle.end());
  }
  std::sort(cover.cycles.begin(), cover.cycles.end(),
            [](const std::vector<int>& a, const std::vector<int>& b) {
              if (a.size() != b.size()) return a.size() < b.size();
              return a.front() < b.front();
            });
}

}  // namespace

CycleCover decompose(const std::vector<int>& sigma) {
  const int n = static_cast<int>(sigma.size());
  std::vector<char> seen(n, 0);
  for (int i = 0; i < n; ++i) {
    if (sigma[i] < 0 || sigma[i] >= n || seen[sigma[i]])
      throw std::invalid_argument("sigma is not a permutation");
    seen[sigma[i]] = 1;
    if (sigma[i] == i)
      throw std::invalid_argument("sigma has a fixed point (self-loop)");
  }

  CycleCover cover;
  cover.n = n;
  std::fill(seen.begin(), seen.end(), 0);
  for (int start = 0; start < n; ++start) {
    if (seen[start]) continue;
    std::vector<int> cycle;
    int z = start;
    while (!seen[z]) {
      seen[z] = 1;
      cycle.push_back(z);
      z = sigma[z];
    }
    cover.cycles.push_back(std::move(cycle));
  }
  canonicalize(cover);
  return cover;
}

unsigned long long count_patching_pairs(const CycleCover& cover) {
  unsigned long long total = static_cast<unsigned long long>(cover.n) *
                             static_cast<unsigned long long>(cover.n);
  unsigned long long squares = 0;
  for (const auto& c : cover.cycles) {
    unsigned long long k = c.size();
    squares += k * k;
  }
  return (total - squares) / 2;
}

std::string patch_policy_name(PatchPolicy p) {
  switch (p) {
    case PatchPolicy::global_min: return "global_min";
    case PatchPolicy::analysis_r: return "analysis_R";
  }
  throw std::logic_error("unknown patch policy");
}

PatchPolicy patch_policy_from_name(const std::string& name) {
  if (name == "global_min") return PatchPolicy::global_min;
  if (name == "analysis_R" || name == "analysis_r")
    return PatchPolicy::analysis_r;
  throw std::invalid_argument("unknown patch policy: " + name);
}

double analysis_r_cost_bound(const InstanceConfig& config,
                             std::size_t cycle_count) {
  const double n = static_cast<double>(config.n);
  const double gamma = gamma_value(n, config.eps);
  const double denom =
      static_cast<double>(cycle_count) * std::pow(n, 1.0 - 2.5 * config.eps);
  return gamma + 1.0 / std::sqrt(denom);
}

std::optional<PatchMove> best_patch(const Instance& inst,
                                    const CycleCover& cover,
                                    PatchPolicy policy) {
  if (cover.cycle_count() < 2)
    throw std::invalid_argument("patching needs at least two cycles");
  const auto& d = inst.digraph();
  const bool restricted = policy == PatchPolicy::analysis_r;
  const double bound =
      restricted ? analysis_r_cost_bound(inst.config(), cover.cycle_count())
                 : 0.0;

  auto insertable = [&](int a, int b) {
    if (!d.has_arc(a, b)) return false;
    if (!restricted) return true;
    return d.origin(a, b) == ArcOrigin::random && inst.cost(a, b) <= bound;
  };

  bool found = false;
  PatchMove best;
  double best_key = 0.0;
  auto consider = [&](int x, int y, int u, int v) {
    if (!insertable(u, y) || !insertable(x, v)) return;
    const double inserted = inst.cost(u, y) + inst.cost(x, v);
    const double delta = inserted - inst.cost(x, y) - inst.cost(u, v);
    const double key = restricted ? inserted : delta;
    if (!found || key < best_key ||
        (key == best_key &&
         (x < best.x || (x == best.x && u < best.u)))) {
      found = true;
      best_key = key;
      best = PatchMove{x, y, u, v, delta, inserted};
    }
  };

  const auto& cycles = cover.cycles;
  for (std::size_t a = 0; a + 1 < cycles.size(); ++a) {
    for (std::size_t b = a + 1; b < cycles.size(); ++b) {
      const auto& ca = cycles[a];
      const auto& cb = cycles[b];
      for (std::size_t p = 0; p < ca.size(); ++p) {
        const int x = ca[p];
        const int y = ca[(p + 1) % ca.size()];
        for (std::size_t q = 0; q < cb.size(); ++q) {
          const int u = cb[q];
          const int v = cb[(q + 1) % cb.size()];
          consider(x, y, u, v);
        }
      }
    }
  }
  if (!found) return std::nullopt;
  return best;
}

double cover_cost(const Instance& inst, const CycleCover& cover) {
  double total = 0.0;
  for (const auto& c : cover.cycles)
    for (std::size_t p = 0; p < c.size(); ++p)
      total += inst.cost(c[p], c[(p + 1) % c.size()]);
  return total;
}

namespace {

// Splices the two cycles touched by the move into one:
// y ... x -> v ... u -> y.
void apply_patch(CycleCover& cover, const PatchMove& move) {
  int idx_a = -1, idx_b = -1;
  for (std::size_t c = 0; c < cover.cycles.size(); ++c) {
    for (int vertex : cover.cycles[c]) {
      if (vertex == move.x) idx_a = static_cast<int>(c);
      if (vertex == move.u) idx_b = static_cast<int>(c);
    }
  }
  if (idx_a < 0 || idx_b < 0 || idx_a == idx_b)
    throw std::invalid_argument("patch move does not span two cycles");

  auto rotate_to_front = [](std::vector<int> cycle, int front) {
    auto it = std::find(cycle.begin(), cycle.end(), front);
    std::rotate(cycle.begin(), it, cycle.end());
    return cycle;
  };
  // cycle A as y ... x, cycle B as v ... u
  std::vector<int> a = rotate_to_front(cover.cycles[idx_a], move.y);
  std::vector<int> b = rotate_to_front(cover.cycles[idx_b], move.v);
  if (a.back() != move.x || b.back() != move.u)
    throw std::invalid_argument("patch move arcs not present in the cover");

  std::vector<int> merged;
  merged.reserve(a.size() + b.size());
  merged.insert(merged.end(), a.begin(), a.end());
  merged.insert(merged.end(), b.begin(), b.end());

  if (idx_a > idx_b) std::swap(idx_a, idx_b);
  cover.cycles.erase(cover.cycles.begin() + idx_b);
  cover.cycles.erase(cover.cycles.begin() + idx_a);
  cover.cycles.push_back(std::move(merged));
  canonicalize(cover);
}

}  // namespace

PatchResult karp_patch(const Instance& inst, const CycleCover& cover,
                       PatchPolicy policy) {
  PatchResult result;
  CycleCover work = cover;
  double cost = cover_cost(inst, work);

  while (work.cycle_count() > 1) {
    auto move = best_patch(inst, work, policy);
    if (!move) {
      result.success = false;
      result.remaining = std::move(work);
      return result;
    }
    const std::size_t cycles_before = work.cycle_count();
    apply_patch(work, *move);
    const double new_cost = cover_cost(inst, work);
    if (work.cycle_count() != cycles_before - 1 ||
        std::abs(new_cost - (cost + move->delta)) > 1e-9 * std::max(1, work.n))
      throw std::logic_error("patch application failed re-validation");
    cost = new_cost;
    result.total_delta += move->delta;
    result.log.push_back(*move);
  }

  result.success = true;
  result.tour.order = work.cycles.front();
  result.tour.cost = cost;
  result.remaining = std::move(work);
  return result;
}

bool is_hamiltonian_tour(const Instance& inst, const Tour& tour) {
  const int n = inst.n();
  if (static_cast<int>(tour.order.size()) != n || n < 2) return false;
  std::vector<char> seen(n, 0);
  for (int v : tour.order) {
    if (v < 0 || v >= n || seen[v]) return false;
    seen[v] = 1;
  }
  for (int p = 0; p < n; ++p) {
    int from = tour.order[p];
    int to = tour.order[(p + 1) % n];
    if (!inst.digraph().has_arc(from, to)) return false;
  }
  return true;
}

}  // namespace patchkit
