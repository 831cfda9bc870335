#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "patchkit/instance.hpp"

namespace patchkit {

// Per-comparison tolerance for optimality checks; aggregate comparisons use
// tol * n.
inline constexpr double kOptimalityTol = 1e-9;

// A perfect matching written as a permutation (sigma[i] = j matches arc
// (i, j)) together with the dual potentials certifying its optimality.
struct ApSolution {
  std::vector<int> sigma;
  std::vector<double> u;  // row duals
  std::vector<double> v;  // column duals
  double value = 0.0;
};

// C(i, j) - u_i - v_j; +infinity for non-arcs.
double reduced_cost(const Instance& inst, const std::vector<double>& u,
                    const std::vector<double>& v, int i, int j);

// Sum of matched costs; +infinity if sigma uses a non-arc.
double matching_value(const Instance& inst, const std::vector<int>& sigma);

struct OptimalityCheck {
  enum class Condition {
    none,
    malformed,             // sigma is not a permutation of [0, n)
    negative_reduced_cost, // some arc has C - u - v < -tol
    matched_arc_slack,     // some matched arc has |C - u - v| > tol
    value_mismatch,        // value disagrees with matched sum or dual sum
  };
  bool pass = false;
  Condition failed = Condition::none;
  int i = -1, j = -1;
  double amount = 0.0;
  std::string detail;
};

// Duality certificate: PASS iff all reduced costs are >= -tol, matched arcs
// are tight within tol, and the objective equals both the matched-cost sum
// and the dual sum within tol * n. On failure reports the first witness.
OptimalityCheck verify_optimal(const Instance& inst, const ApSolution& sol);

void write_solution(const ApSolution& sol, std::ostream& out);
ApSolution read_solution(std::istream& in);

}  // namespace patchkit
