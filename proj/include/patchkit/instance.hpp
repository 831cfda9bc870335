#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "patchkit/digraph.hpp"

namespace patchkit {

enum class CostDist { exp1, uniform01 };

std::string cost_dist_name(CostDist d);
CostDist cost_dist_from_name(const std::string& name);

struct InstanceConfig {
  int n = 0;
  double alpha = 0.5;
  double eps = 0.25;
  Family family = Family::complete;
  CostDist cost_dist = CostDist::exp1;
};

// Derived scale parameters. The exact values are the real-valued powers;
// the *_count fields are the integer ceilings used wherever the quantity
// acts as a count. l1_count is additionally capped at n, where the short
// cycle definition degenerates.
struct Thresholds {
  double r0 = 0.0;       // n^(1-3*eps)
  double l1 = 0.0;       // n^(4*eps)
  double gamma_n = 0.0;  // n^-(1-2*eps)
  long long r0_count = 0;
  long long l1_count = 0;
};

double r0_value(double n, double eps);
double l1_value(double n, double eps);
double gamma_value(double n, double eps);
long long l1_cap(int n, double eps);  // ceil(n^(4 eps)) capped at n

// Throws std::invalid_argument when eps >= 1/3 (r0 degenerates).
Thresholds thresholds(const InstanceConfig& config);

// Digraph plus one finite nonnegative cost per arc; absent pairs read as
// +infinity. Reproducible bit-for-bit from (config, seed).
class Instance {
 public:
  Instance(Digraph digraph, std::vector<double> costs, InstanceConfig config,
           std::uint64_t seed);

  int n() const { return digraph_.n(); }
  const Digraph& digraph() const { return digraph_; }
  const InstanceConfig& config() const { return config_; }
  std::uint64_t seed() const { return seed_; }
  long long arc_count() const { return digraph_.arc_count(); }

  double cost(int i, int j) const {
    return costs_[static_cast<std::size_t>(i) * digraph_.n() + j];
  }

  static constexpr double infinity() {
    return std::numeric_limits<double>::infinity();
  }

 private:
  Digraph digraph_;
  std::vector<double> costs_;  // dense n*n, +inf off-arc
  InstanceConfig config_;
  std::uint64_t seed_ = 0;
};

// One i.i.d. cost draw per arc, keyed by (seed, i, j) so the cost of an arc
// does not depend on how the arc set was enumerated.
Instance sample_costs(const Digraph& digraph, CostDist dist,
                      std::uint64_t seed, InstanceConfig config = {});

// Full pipeline: base family -> random perturbation -> costs.
Instance make_instance(const InstanceConfig& config, std::uint64_t seed);

// Canonical single-document JSON with arcs sorted by (i, j) and costs
// printed with 17 significant digits; identical (config, seed) gives
// identical bytes.
void write_instance(const Instance& instance, std::ostream& out);
Instance read_instance(std::istream& in);

Instance load_instance_file(const std::string& path);
void save_instance_file(const Instance& instance, const std::string& path);

}  // namespace patchkit
