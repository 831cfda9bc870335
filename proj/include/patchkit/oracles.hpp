#pragma once

#include <optional>
#include <vector>

#include "patchkit/cycles.hpp"
#include "patchkit/instance.hpp"

namespace patchkit::oracles {

// Hard caps on exact enumeration; calls above them throw std::invalid_argument
// rather than silently approximating.
inline constexpr int kMaxBruteApN = 9;
inline constexpr int kMaxHeldKarpN = 15;
inline constexpr int kMaxBruteAtspN = 9;

struct BruteApResult {
  double value = 0.0;  // +inf when no feasible permutation exists
  std::vector<int> sigma;
};

// Exact assignment optimum by enumerating all n! permutations of a dense
// row-major cost matrix (+inf marks forbidden pairs). Ties resolve to the
// lexicographically smallest sigma.
BruteApResult brute_ap(const std::vector<double>& costs, int n);
BruteApResult brute_ap(const Instance& inst);

struct AtspResult {
  double value = 0.0;  // +inf when no Hamiltonian cycle exists
  std::vector<int> tour;
};

// Exact minimum-cost directed Hamiltonian cycle via subset dynamic
// programming over 2^n * n states.
AtspResult held_karp_atsp(const std::vector<double>& costs, int n);
AtspResult held_karp_atsp(const Instance& inst);

// Even simpler cross-check: enumerate all (n-1)! tours through vertex 0.
AtspResult brute_atsp(const std::vector<double>& costs, int n);

// Reference scan for best_patch(global_min): one flat double loop over all
// arc pairs from distinct cycles.
std::optional<PatchMove> exhaustive_best_patch(const Instance& inst,
                                               const CycleCover& cover);

std::vector<double> dense_costs(const Instance& inst);

}  // namespace patchkit::oracles
