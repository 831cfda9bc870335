#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace patchkit {

enum class ArcOrigin : std::uint8_t { none = 0, base = 1, random = 2 };

enum class Family { complete, random_regularish, clustered_adversarial };

std::string family_name(Family f);
Family family_from_name(const std::string& name);

// Simple digraph on vertices [0, n): no self-loops, no duplicate arcs,
// each arc tagged with its provenance (base digraph vs. random overlay).
class Digraph {
 public:
  explicit Digraph(int n);

  int n() const { return n_; }
  long long arc_count() const { return arc_count_; }

  bool has_arc(int i, int j) const { return tag(i, j) != ArcOrigin::none; }
  ArcOrigin origin(int i, int j) const { return tag(i, j); }

  // Adds (i, j) unless already present; an arc present in both layers keeps
  // its base tag.
  void add_arc(int i, int j, ArcOrigin origin);

  const std::vector<int>& out_neighbors(int i) const { return out_[i]; }
  const std::vector<int>& in_neighbors(int j) const { return in_[j]; }
  int out_degree(int i) const { return static_cast<int>(out_[i].size()); }
  int in_degree(int j) const { return static_cast<int>(in_[j].size()); }

  // Sorts adjacency lists; generators call this once after construction so
  // iteration order is canonical.
  void normalize();

 private:
  ArcOrigin tag(int i, int j) const {
    return tags_[static_cast<std::size_t>(i) * n_ + j];
  }

  int n_ = 0;
  long long arc_count_ = 0;
  std::vector<ArcOrigin> tags_;
  std::vector<std::vector<int>> out_, in_;
};

// Builds a base digraph with minimum in- and out-degree ceil(alpha * n).
// Throws std::invalid_argument if the degree requirement cannot be met
// without self-loops (ceil(alpha * n) >= n) or parameters are out of range.
Digraph generate_base(Family family, int n, double alpha, std::uint64_t seed);

// Adds each absent ordered pair independently with probability n^-eps,
// tagged random. Base arcs are left untouched.
Digraph perturb(const Digraph& base, double eps, std::uint64_t seed);

}  // namespace patchkit
