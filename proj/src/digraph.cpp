#include "patchkit/digraph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "patchkit/rng.hpp"

namespace patchkit {

std::string family_name(Family f) {
  switch (f) {
    case Family::complete: return "complete";
    case Family::random_regularish: return "random_regularish";
    case Family::clustered_adversarial: return "clustered_adversarial";
  }
  throw std::logic_error("unknown family");
}

Family family_from_name(const std::string& name) {
  if (name == "complete") return Family::complete;
  if (name == "random_regularish") return Family::random_regularish;
  if (name == "clustered_adversarial") return Family::clustered_adversarial;
  throw std::invalid_argument("unknown digraph family: " + name);
}

Digraph::Digraph(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("digraph needs at least one vertex");
  tags_.assign(static_cast<std::size_t>(n) * n, ArcOrigin::none);
  out_.resize(n);
  in_.resize(n);
}

void Digraph::add_arc(int i, int j, ArcOrigin origin) {
  if (i < 0 || i >= n_ || j < 0 || j >= n_)
    throw std::out_of_range("arc endpoint out of range");
  if (i == j) throw std::invalid_argument("self-loops are not allowed");
  if (origin == ArcOrigin::none)
    throw std::invalid_argument("arc origin must be base or random");
  ArcOrigin& slot = tags_[static_cast<std::size_t>(i) * n_ + j];
  if (slot != ArcOrigin::none) return;  // base tag wins; duplicates ignored
  slot = origin;
  out_[i].push_back(j);
  in_[j].push_back(i);
  ++arc_count_;
}

void Digraph::normalize() {
  for (auto& v : out_) std::sort(v.begin(), v.end());
  for (auto& v : in_) std::sort(v.begin(), v.end());
}

namespace {

int required_degree(int n, double alpha) {
  return static_cast<int>(std::ceil(alpha * n));
}

// Adds uniformly random missing arcs incident to deficient vertices until
// every vertex meets the degree bound. Lowest-index deficient vertex first,
// out-deficiency before in-deficiency; each added arc strictly reduces the
// total deficit, so this terminates.
void repair_degrees(Digraph& d, int need, rng::Sequence& seq) {
  const int n = d.n();
  for (;;) {
    int v = -1;
    bool out_side = false;
    for (int i = 0; i < n; ++i) {
      if (d.out_degree(i) < need) {
        v = i;
        out_side = true;
        break;
      }
      if (d.in_degree(i) < need) {
        v = i;
        out_side = false;
        break;
      }
    }
    if (v < 0) return;
    std::vector<int> candidates;
    candidates.reserve(n);
    for (int w = 0; w < n; ++w) {
      if (w == v) continue;
      bool present = out_side ? d.has_arc(v, w) : d.has_arc(w, v);
      if (!present) candidates.push_back(w);
    }
    if (candidates.empty())
      throw std::logic_error("degree repair ran out of candidate arcs");
    int w = candidates[seq.next_below(candidates.size())];
    if (out_side)
      d.add_arc(v, w, ArcOrigin::base);
    else
      d.add_arc(w, v, ArcOrigin::base);
  }
}

}  // namespace

Digraph generate_base(Family family, int n, double alpha, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("base digraph needs n >= 2");
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::invalid_argument("alpha must lie in (0, 1]");
  const int need = required_degree(n, alpha);
  if (need >= n)
    throw std::invalid_argument(
        "degree bound ceil(alpha*n) unsatisfiable without self-loops");

  Digraph d(n);
  switch (family) {
    case Family::complete: {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) d.add_arc(i, j, ArcOrigin::base);
      break;
    }
    case Family::random_regularish: {
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (i == j) continue;
          std::uint64_t h = rng::stream_key(seed, rng::Stream::base_arc,
                                            static_cast<std::uint64_t>(i),
                                            static_cast<std::uint64_t>(j));
          if (rng::unit_double(h) < alpha) d.add_arc(i, j, ArcOrigin::base);
        }
      }
      rng::Sequence seq(rng::stream_key(seed, rng::Stream::degree_repair));
      repair_degrees(d, need, seq);
      break;
    }
    case Family::clustered_adversarial: {
      // floor(1/alpha) dense blocks and nothing across them; long-range
      // structure must come entirely from the perturbation.
      int blocks = std::max(1, static_cast<int>(std::floor(1.0 / alpha)));
      blocks = std::min(blocks, n);
      std::vector<int> block_of(n);
      int base_size = n / blocks, extra = n % blocks, v = 0;
      for (int b = 0; b < blocks; ++b) {
        int size = base_size + (b < extra ? 1 : 0);
        for (int k = 0; k < size; ++k) block_of[v++] = b;
      }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j && block_of[i] == block_of[j])
            d.add_arc(i, j, ArcOrigin::base);
      rng::Sequence seq(rng::stream_key(seed, rng::Stream::degree_repair));
      repair_degrees(d, need, seq);
      break;
    }
  }
  d.normalize();
  return d;
}

Digraph perturb(const Digraph& base, double eps, std::uint64_t seed) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const int n = base.n();
  const double p = std::pow(static_cast<double>(n), -eps);
  Digraph d = base;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j || base.has_arc(i, j)) continue;
      std::uint64_t h = rng::stream_key(seed, rng::Stream::perturb_arc,
                                        static_cast<std::uint64_t>(i),
                                        static_cast<std::uint64_t>(j));
      if (rng::unit_double(h) < p) d.add_arc(i, j, ArcOrigin::random);
    }
  }
  d.normalize();
  return d;
}

}  // namespace patchkit
