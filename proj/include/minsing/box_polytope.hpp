#pragma once

// The polytope Box_L of exponent vectors alpha >= 0, |alpha| <= 1 for which
// c1(L|_Y) + sum alpha_l c1(N_l^{-1}) stays in the pseudo-effective cone.
// All facet data and vertices are exact rationals.

#include <algorithm>
#include <optional>
#include <utility>
#include <vector>

#include "minsing/errors.hpp"
#include "minsing/ns_geometry.hpp"
#include "minsing/rational.hpp"

namespace minsing {

/// <normal, alpha> + offset >= 0
struct Halfspace {
  RationalVector normal;
  Rational offset;

  bool contains(const RationalVector& p) const { return dot(normal, p) + offset >= 0; }
  bool tight_at(const RationalVector& p) const { return dot(normal, p) + offset == 0; }
  friend bool operator==(const Halfspace&, const Halfspace&) = default;
};

inline constexpr std::size_t kMaxBoxDimension = 6;

class BoxPolytope {
 public:
  /// The simplex constraints alpha_l >= 0 and 1 - |alpha| >= 0 are always
  /// present; they are prepended when missing from `extra`.
  BoxPolytope(std::size_t r, std::vector<Halfspace> extra) : r_(r) {
    if (r_ == 0) throw InputError("Box_L needs codimension r >= 1");
    for (std::size_t l = 0; l < r_; ++l) {
      Halfspace h{RationalVector(r_, Rational(0)), Rational(0)};
      h.normal[l] = 1;
      halfspaces_.push_back(std::move(h));
    }
    halfspaces_.push_back({RationalVector(r_, Rational(-1)), Rational(1)});
    for (auto& h : extra) {
      if (h.normal.size() != r_) throw InputError("halfspace normal has wrong length");
      if (std::find(halfspaces_.begin(), halfspaces_.end(), h) == halfspaces_.end())
        halfspaces_.push_back(std::move(h));
    }
  }

  /// The standard simplex {alpha >= 0, |alpha| <= 1}.
  static BoxPolytope simplex(std::size_t r) { return BoxPolytope(r, {}); }

  std::size_t dimension() const { return r_; }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }

  bool contains(const RationalVector& alpha) const {
    if (alpha.size() != r_) throw InputError("point has wrong dimension");
    return std::all_of(halfspaces_.begin(), halfspaces_.end(),
                       [&](const Halfspace& h) { return h.contains(alpha); });
  }

  bool has_vertices() const { return vertices_.has_value(); }
  const std::vector<RationalVector>& cached_vertices() const { return *vertices_; }

 private:
  friend const std::vector<RationalVector>& enumerate_vertices(BoxPolytope& box);

  std::size_t r_;
  std::vector<Halfspace> halfspaces_;
  std::optional<std::vector<RationalVector>> vertices_;
};

inline BoxPolytope build_box(const DivisorClass& l_restr, const std::vector<DivisorClass>& conormal_classes,
                             const PsefCone& cone) {
  if (conormal_classes.empty()) throw InputError("need at least one conormal class");
  if (l_restr.rank() != cone.rank()) throw InputError("c1(L|_Y) rank does not match cone rank");
  for (const auto& c : conormal_classes)
    if (c.rank() != cone.rank()) throw InputError("conormal class rank does not match cone rank");

  const auto r = conormal_classes.size();
  std::vector<Halfspace> extra;
  for (const auto& ell : cone.halfspaces()) {
    Halfspace h{RationalVector(r), dot(ell, l_restr.coords)};
    for (std::size_t l = 0; l < r; ++l) h.normal[l] = dot(ell, conormal_classes[l].coords);
    extra.push_back(std::move(h));
  }
  return BoxPolytope(r, std::move(extra));
}

namespace detail {

// Solves the square system rows * x = rhs by fraction-exact Gauss-Jordan.
// Returns nullopt when singular.
inline std::optional<RationalVector> solve_exact(std::vector<RationalVector> rows, RationalVector rhs) {
  const auto n = rows.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    while (piv < n && rows[piv][col] == 0) ++piv;
    if (piv == n) return std::nullopt;
    std::swap(rows[piv], rows[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || rows[i][col] == 0) continue;
      Rational f = rows[i][col] / rows[col][col];
      for (std::size_t j = col; j < n; ++j) rows[i][j] -= f * rows[col][j];
      rhs[i] -= f * rhs[col];
    }
  }
  RationalVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / rows[i][i];
  return x;
}

template <class F>
void for_each_subset(std::size_t n, std::size_t k, F&& f) {
  if (k > n) return;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    f(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

/// Every r-subset of halfspaces is made active and solved exactly; feasible
/// solutions are the vertices. Sorted lexicographically, deduplicated, cached.
inline const std::vector<RationalVector>& enumerate_vertices(BoxPolytope& box) {
  if (box.vertices_) return *box.vertices_;
  const auto r = box.dimension();
  if (r > kMaxBoxDimension)
    throw UnsupportedDimension("vertex enumeration supports r <= 6, got r = " + std::to_string(r));

  const auto& hs = box.halfspaces();
  std::vector<RationalVector> found;
  detail::for_each_subset(hs.size(), r, [&](const std::vector<std::size_t>& active) {
    std::vector<RationalVector> rows;
    RationalVector rhs;
    for (auto i : active) {
      rows.push_back(hs[i].normal);
      rhs.push_back(-hs[i].offset);
    }
    auto x = detail::solve_exact(std::move(rows), std::move(rhs));
    if (x && box.contains(*x)) found.push_back(std::move(*x));
  });
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  box.vertices_ = std::move(found);
  return *box.vertices_;
}

/// Vertices without touching a cache (for const boxes).
inline std::vector<RationalVector> vertices_of(const BoxPolytope& box) {
  if (box.has_vertices()) return box.cached_vertices();
  BoxPolytope copy = box;
  return enumerate_vertices(copy);
}

/// Box_L is always bounded (it sits in the simplex), so it is empty exactly
/// when it has no vertex.
inline bool is_empty(const BoxPolytope& box) { return vertices_of(box).empty(); }

inline Rational sum(const RationalVector& v) {
  Rational s = 0;
  for (const auto& x : v) s += x;
  return s;
}

/// min <alpha, d> over the box; nullopt when the box is empty.
inline std::optional<Rational> min_linear(const BoxPolytope& box, const RationalVector& d) {
  if (d.size() != box.dimension()) throw InputError("direction has wrong dimension");
  auto verts = vertices_of(box);
  if (verts.empty()) return std::nullopt;
  Rational best = dot(verts.front(), d);
  for (const auto& v : verts) best = std::min(best, dot(v, d));
  return best;
}

/// min |alpha| over the box; nullopt signals an infeasible box.
inline std::optional<Rational> min_total(const BoxPolytope& box) {
  return min_linear(box, RationalVector(box.dimension(), Rational(1)));
}

inline bool contains_origin(const BoxPolytope& box) {
  return box.contains(RationalVector(box.dimension(), Rational(0)));
}

/// Box_L of the blown-up P^3 example (r = 2, restriction lattice of Y has
/// rank 1 with cone {deg >= 0}, c1(N_l^{-1}) = -deg N_l).
inline BoxPolytope zariski_box(int n) {
  auto deg = zariski_degrees(n);
  DivisorClass l_restr{{deg.deg_l_restr}, std::string("L|_Y")};
  std::vector<DivisorClass> conormals{{{-deg.deg_n1}, std::string("N_1^-1")},
                                      {{-deg.deg_n2}, std::string("N_2^-1")}};
  return build_box(l_restr, conormals, PsefCone::nonnegative_degree());
}

}  // namespace minsing
