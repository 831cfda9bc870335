#include "patchkit/assignment.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "json.hpp"

namespace patchkit {

double reduced_cost(const Instance& inst, const std::vector<double>& u,
                    const std::vector<double>& v, int i, int j) {
  double c = inst.cost(i, j);
  if (c == Instance::infinity()) return c;
  return c - u[i] - v[j];
}

double matching_value(const Instance& inst, const std::vector<int>& sigma) {
  double total = 0.0;
  for (int i = 0; i < static_cast<int>(sigma.size()); ++i) {
    double c = inst.cost(i, sigma[i]);
    if (c == Instance::infinity()) return c;
    total += c;
  }
  return total;
}

namespace {

bool is_permutation(const std::vector<int>& sigma, int n) {
  if (static_cast<int>(sigma.size()) != n) return false;
  std::vector<char> seen(n, 0);
  for (int j : sigma) {
    if (j < 0 || j >= n || seen[j]) return false;
    seen[j] = 1;
  }
  return true;
}

}  // namespace

OptimalityCheck verify_optimal(const Instance& inst, const ApSolution& sol) {
  OptimalityCheck result;
  const int n = inst.n();
  if (!is_permutation(sol.sigma, n) ||
      static_cast<int>(sol.u.size()) != n ||
      static_cast<int>(sol.v.size()) != n) {
    result.failed = OptimalityCheck::Condition::malformed;
    result.detail = "sigma/duals are not a permutation plus n+n potentials";
    return result;
  }

  // (a) dual feasibility on every arc
  for (int i = 0; i < n; ++i) {
    for (int j : inst.digraph().out_neighbors(i)) {
      double rc = inst.cost(i, j) - sol.u[i] - sol.v[j];
      if (rc < -kOptimalityTol) {
        result.failed = OptimalityCheck::Condition::negative_reduced_cost;
        result.i = i;
        result.j = j;
        result.amount = rc;
        result.detail = "reduced cost below -tol on arc";
        return result;
      }
    }
  }

  // (b) complementary slackness on matched arcs
  for (int i = 0; i < n; ++i) {
    int j = sol.sigma[i];
    double c = inst.cost(i, j);
    if (c == Instance::infinity()) {
      result.failed = OptimalityCheck::Condition::matched_arc_slack;
      result.i = i;
      result.j = j;
      result.amount = c;
      result.detail = "matched pair is not an arc";
      return result;
    }
    double rc = c - sol.u[i] - sol.v[j];
    if (rc > kOptimalityTol) {
      result.failed = OptimalityCheck::Condition::matched_arc_slack;
      result.i = i;
      result.j = j;
      result.amount = rc;
      result.detail = "matched arc not tight";
      return result;
    }
  }

  // (c) objective consistency: matched sum and dual sum
  const double aggregate_tol = kOptimalityTol * n;
  double matched = matching_value(inst, sol.sigma);
  if (std::abs(sol.value - matched) > aggregate_tol) {
    result.failed = OptimalityCheck::Condition::value_mismatch;
    result.amount = sol.value - matched;
    result.detail = "value disagrees with sum of matched costs";
    return result;
  }
  double dual_sum = 0.0;
  for (int i = 0; i < n; ++i) dual_sum += sol.u[i] + sol.v[i];
  if (std::abs(sol.value - dual_sum) > aggregate_tol) {
    result.failed = OptimalityCheck::Condition::value_mismatch;
    result.amount = sol.value - dual_sum;
    result.detail = "value disagrees with dual objective";
    return result;
  }

  result.pass = true;
  return result;
}

void write_solution(const ApSolution& sol, std::ostream& out) {
  nlohmann::json doc;
  doc["sigma"] = sol.sigma;
  doc["u"] = sol.u;
  doc["v"] = sol.v;
  doc["value"] = sol.value;
  out << doc.dump() << '\n';
}

ApSolution read_solution(std::istream& in) {
  nlohmann::json doc = nlohmann::json::parse(in);
  ApSolution sol;
  sol.sigma = doc.at("sigma").get<std::vector<int>>();
  sol.u = doc.at("u").get<std::vector<double>>();
  sol.v = doc.at("v").get<std::vector<double>>();
  sol.value = doc.at("value").get<double>();
  return sol;
}

}  // namespace patchkit
