#pragma once

#include <optional>
#include <string>
#include <vector>

#include "patchkit/instance.hpp"

namespace patchkit {

// Vertex-disjoint directed cycles covering [0, n), induced by a fixed-point
// free permutation. Canonical form: each cycle starts at its smallest
// vertex, cycles sorted by (length, first vertex).
struct CycleCover {
  std::vector<std::vector<int>> cycles;
  int n = 0;

  std::size_t cycle_count() const { return cycles.size(); }
  std::vector<int> lengths() const;
};

// Throws std::invalid_argument unless sigma is a permutation with no fixed
// points (cycle length 1 would need a self-loop).
CycleCover decompose(const std::vector<int>& sigma);

// Number of candidate patching pairs sum_{i<j} k_i k_j, ignoring arc
// existence. Always >= cycle_count * n / 2 for fixed-point free covers.
unsigned long long count_patching_pairs(const CycleCover& cover);

enum class PatchPolicy { global_min, analysis_r };

std::string patch_policy_name(PatchPolicy p);
PatchPolicy patch_policy_from_name(const std::string& name);

// Removing e = (x, y) and f = (u, v) from two different cycles and inserting
// e' = (u, y), f' = (x, v) splices the cycles into one. delta is the true
// net cost change; inserted_cost is C(u,y) + C(x,v) alone.
struct PatchMove {
  int x = -1, y = -1;  // removed arc in the first cycle
  int u = -1, v = -1;  // removed arc in the second cycle
  double delta = 0.0;
  double inserted_cost = 0.0;
};

// Cheapest valid patching pair across all cycle pairs, or nullopt when no
// pair has both inserted arcs present.
//
// global_min minimizes delta over every existing pair. analysis_r restricts
// the inserted arcs to random-origin arcs of cost at most
// gamma_n + (l * n^(1 - 5 eps / 2))^(-1/2) with l the current cycle count,
// and minimizes the inserted cost alone (the deleted arcs' saving is
// deliberately ignored by that accounting). Ties break lexicographically
// on (x, u).
std::optional<PatchMove> best_patch(const Instance& inst,
                                    const CycleCover& cover,
                                    PatchPolicy policy);

double analysis_r_cost_bound(const InstanceConfig& config,
                             std::size_t cycle_count);

struct Tour {
  std::vector<int> order;  // visits each vertex once; arc from back to front
  double cost = 0.0;
};

struct PatchResult {
  bool success = false;
  Tour tour;                   // valid when success
  std::vector<PatchMove> log;  // applied moves in order
  double total_delta = 0.0;    // sum of move deltas
  CycleCover remaining;        // cover at the point of failure
};

// Repeatedly applies best_patch until one cycle remains. Each application
// is re-validated: one fewer cycle, cover cost moved by exactly delta.
PatchResult karp_patch(const Instance& inst, const CycleCover& cover,
                       PatchPolicy policy);

double cover_cost(const Instance& inst, const CycleCover& cover);

// Independent validity scan: every vertex exactly once, every hop an arc.
bool is_hamiltonian_tour(const Instance& inst, const Tour& tour);

}  // namespace patchkit
