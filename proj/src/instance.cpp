#include "patchkit/instance.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "patchkit/rng.hpp"

namespace patchkit {

std::string cost_dist_name(CostDist d) {
  switch (d) {
    case CostDist::exp1: return "exp1";
    case CostDist::uniform01: return "uniform01";
  }
  throw std::logic_error("unknown cost distribution");
}

CostDist cost_dist_from_name(const std::string& name) {
  if (name == "exp1") return CostDist::exp1;
  if (name == "uniform01") return CostDist::uniform01;
  throw std::invalid_argument("unknown cost distribution: " + name);
}

double r0_value(double n, double eps) { return std::pow(n, 1.0 - 3.0 * eps); }
double l1_value(double n, double eps) { return std::pow(n, 4.0 * eps); }
double gamma_value(double n, double eps) {
  return std::pow(n, -(1.0 - 2.0 * eps));
}

long long l1_cap(int n, double eps) {
  double raw = std::ceil(l1_value(static_cast<double>(n), eps));
  if (!(raw < static_cast<double>(n))) return n;
  return static_cast<long long>(raw);
}

Thresholds thresholds(const InstanceConfig& config) {
  if (config.n < 1) throw std::invalid_argument("config.n must be positive");
  if (!(config.eps > 0.0))
    throw std::invalid_argument("config.eps must be positive");
  if (config.eps >= 1.0 / 3.0)
    throw std::invalid_argument(
        "eps >= 1/3 rejected: r0 = n^(1-3 eps) degenerates below 1");
  Thresholds t;
  const double n = static_cast<double>(config.n);
  t.r0 = r0_value(n, config.eps);
  t.l1 = l1_value(n, config.eps);
  t.gamma_n = gamma_value(n, config.eps);
  t.r0_count = static_cast<long long>(std::ceil(t.r0));
  t.l1_count = l1_cap(config.n, config.eps);
  return t;
}

Instance::Instance(Digraph digraph, std::vector<double> costs,
                   InstanceConfig config, std::uint64_t seed)
    : digraph_(std::move(digraph)),
      costs_(std::move(costs)),
      config_(config),
      seed_(seed) {
  const int n = digraph_.n();
  if (costs_.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("cost matrix size does not match digraph");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double c = costs_[static_cast<std::size_t>(i) * n + j];
      if (digraph_.has_arc(i, j)) {
        if (!(c >= 0.0) || !std::isfinite(c))
          throw std::invalid_argument("arc cost must be finite and >= 0");
      } else if (c != infinity()) {
        throw std::invalid_argument("non-arc pair must cost +infinity");
      }
    }
  }
  config_.n = n;
}

Instance sample_costs(const Digraph& digraph, CostDist dist,
                      std::uint64_t seed, InstanceConfig config) {
  const int n = digraph.n();
  std::vector<double> costs(static_cast<std::size_t>(n) * n,
                            Instance::infinity());
  for (int i = 0; i < n; ++i) {
    for (int j : digraph.out_neighbors(i)) {
      std::uint64_t h = rng::stream_key(seed, rng::Stream::arc_cost,
                                        static_cast<std::uint64_t>(i),
                                        static_cast<std::uint64_t>(j));
      double c = dist == CostDist::exp1 ? rng::exp1_double(h)
                                        : rng::unit_double(h);
      costs[static_cast<std::size_t>(i) * n + j] = c;
    }
  }
  config.n = n;
  config.cost_dist = dist;
  return Instance(digraph, std::move(costs), config, seed);
}

Instance make_instance(const InstanceConfig& config, std::uint64_t seed) {
  Digraph base = generate_base(config.family, config.n, config.alpha, seed);
  Digraph perturbed = config.family == Family::complete
                          ? std::move(base)
                          : perturb(base, config.eps, seed);
  return sample_costs(perturbed, config.cost_dist, seed, config);
}

namespace {

std::string fmt_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt_param(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void write_instance(const Instance& instance, std::ostream& out) {
  const auto& cfg = instance.config();
  const auto& d = instance.digraph();
  out << "{\"config\":{"
      << "\"n\":" << cfg.n << ",\"alpha\":" << fmt_param(cfg.alpha)
      << ",\"eps\":" << fmt_param(cfg.eps) << ",\"family\":\""
      << family_name(cfg.family) << "\",\"cost_dist\":\""
      << cost_dist_name(cfg.cost_dist) << "\"},\"seed\":" << instance.seed()
      << ",\"arcs\":[";
  bool first = true;
  for (int i = 0; i < d.n(); ++i) {
    for (int j : d.out_neighbors(i)) {
      if (!first) out << ',';
      first = false;
      out << '[' << i << ',' << j << ',' << fmt_g17(instance.cost(i, j))
          << ",\"" << (d.origin(i, j) == ArcOrigin::base ? "base" : "random")
          << "\"]";
    }
  }
  out << "]}\n";
}

Instance read_instance(std::istream& in) {
  nlohmann::json doc = nlohmann::json::parse(in);
  const auto& jcfg = doc.at("config");
  InstanceConfig cfg;
  cfg.n = jcfg.at("n").get<int>();
  cfg.alpha = jcfg.at("alpha").get<double>();
  cfg.eps = jcfg.at("eps").get<double>();
  cfg.family = family_from_name(jcfg.at("family").get<std::string>());
  cfg.cost_dist = cost_dist_from_name(jcfg.at("cost_dist").get<std::string>());
  std::uint64_t seed = doc.at("seed").get<std::uint64_t>();

  Digraph d(cfg.n);
  std::vector<double> costs(static_cast<std::size_t>(cfg.n) * cfg.n,
                            Instance::infinity());
  for (const auto& arc : doc.at("arcs")) {
    if (!arc.is_array() || arc.size() != 4)
      throw std::invalid_argument("arc entries must be [i, j, cost, origin]");
    int i = arc[0].get<int>();
    int j = arc[1].get<int>();
    double c = arc[2].get<double>();
    std::string origin = arc[3].get<std::string>();
    if (origin != "base" && origin != "random")
      throw std::invalid_argument("arc origin must be base or random");
    d.add_arc(i, j, origin == "base" ? ArcOrigin::base : ArcOrigin::random);
    costs[static_cast<std::size_t>(i) * cfg.n + j] = c;
  }
  d.normalize();
  return Instance(std::move(d), std::move(costs), cfg, seed);
}

Instance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  return read_instance(in);
}

void save_instance_file(const Instance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  write_instance(instance, out);
}

}  // namespace patchkit
