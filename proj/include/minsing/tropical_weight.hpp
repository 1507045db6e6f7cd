#pragma once

// Max-plus weights  w(t) = max_alpha ( <alpha, t> + c_alpha )  in the
// log-coordinates t_l = log|z_l|^2. This is the logarithm of
// max_alpha prod |z_l|^{2 alpha_l} e^{c_alpha}, with 0^0 = 1.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "minsing/box_polytope.hpp"
#include "minsing/errors.hpp"
#include "minsing/rational.hpp"

namespace minsing {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// t_l = log|z_l|^2; -inf marks z_l = 0.
using LogPoint = std::vector<double>;

struct TropicalPiece {
  RationalVector alpha;
  double offset = 0.0;
};

class TropicalWeight {
 public:
  TropicalWeight(std::size_t r, std::vector<TropicalPiece> pieces) : r_(r), pieces_(std::move(pieces)) {
    if (r_ == 0) throw InputError("tropical weight needs r >= 1");
    if (pieces_.empty()) throw InputError("tropical weight needs at least one piece");
    for (const auto& p : pieces_) {
      if (p.alpha.size() != r_) throw InputError("piece exponent has wrong length");
      Rational total = 0;
      for (const auto& a : p.alpha) {
        if (a < 0) throw InputError("piece exponent has a negative entry");
        total += a;
      }
      if (total > 1) throw InputError("piece exponent has |alpha| > 1");
      if (!std::isfinite(p.offset)) throw InputError("piece offset must be finite");
      slopes_.emplace_back();
      for (const auto& a : p.alpha) slopes_.back().push_back(to_double(a));
    }
  }

  std::size_t dimension() const { return r_; }
  const std::vector<TropicalPiece>& pieces() const { return pieces_; }

  TropicalWeight shifted(double k) const {
    auto pieces = pieces_;
    for (auto& p : pieces) p.offset += k;
    return TropicalWeight(r_, std::move(pieces));
  }

  /// Value of one affine piece; alpha_l = 0 annihilates t_l = -inf.
  double piece_value(std::size_t i, std::span<const double> t) const {
    double acc = pieces_[i].offset;
    const auto& s = slopes_[i];
    for (std::size_t l = 0; l < r_; ++l) {
      if (s[l] == 0.0) continue;
      if (t[l] == kNegInf) return kNegInf;
      acc += s[l] * t[l];
    }
    return acc;
  }

  struct Trace {
    double value;
    std::size_t piece;  // lexicographically smallest alpha among the maximisers
  };

  Trace evaluate_traced(std::span<const double> t) const {
    if (t.size() != r_) throw InputError("log point has wrong dimension");
    Trace best{piece_value(0, t), 0};
    for (std::size_t i = 1; i < pieces_.size(); ++i) {
      double v = piece_value(i, t);
      if (v > best.value || (v == best.value && pieces_[i].alpha < pieces_[best.piece].alpha)) best = {v, i};
    }
    return best;
  }

  double evaluate(std::span<const double> t) const { return evaluate_traced(t).value; }
  double operator()(std::span<const double> t) const { return evaluate(t); }

 private:
  std::size_t r_;
  std::vector<TropicalPiece> pieces_;
  std::vector<std::vector<double>> slopes_;
};

/// One piece per vertex of Box_L. A max of an affine function over a polytope
/// sits at a vertex, so this is the whole box up to O(1).
inline std::optional<TropicalWeight> from_box(const BoxPolytope& box,
                                              const std::function<double(const RationalVector&)>& offset = {}) {
  auto verts = vertices_of(box);
  if (verts.empty()) return std::nullopt;
  std::vector<TropicalPiece> pieces;
  for (auto& v : verts) {
    double c = offset ? offset(v) : 0.0;
    pieces.push_back({std::move(v), c});
  }
  return TropicalWeight(box.dimension(), std::move(pieces));
}

/// Coefficient of log|z|^2 along a generic approach to Y: min |alpha| on Box_L.
inline std::optional<Rational> generic_lelong(const BoxPolytope& box) { return min_total(box); }

/// Coefficient of log s along z_l = v_l s^{d_l}: min <alpha, d> on Box_L.
inline std::optional<Rational> directional_coefficient(const BoxPolytope& box, const RationalVector& d) {
  for (const auto& x : d)
    if (x <= 0) throw InputError("direction entries must be positive");
  return min_linear(box, d);
}

/// Axis-aligned region in t-space. Lower bounds are finite (a region reaching
/// -inf is truncated by the caller).
struct LogBox {
  std::vector<double> lo;
  std::vector<double> hi;
};

namespace detail {

inline double radical_inverse(std::uint64_t i, std::uint32_t base) {
  double inv = 1.0 / base, f = inv, x = 0.0;
  while (i > 0) {
    x += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return x;
}

inline constexpr std::uint32_t kHaltonPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

}  // namespace detail

/// The i-th Halton point (i >= 1) mapped into the region.
inline std::vector<double> halton_point(const LogBox& region, std::uint64_t i) {
  const auto r = region.lo.size();
  if (r > std::size(detail::kHaltonPrimes)) throw UnsupportedDimension("Halton sampling supports r <= 12");
  std::vector<double> t(r);
  for (std::size_t l = 0; l < r; ++l)
    t[l] = region.lo[l] + (region.hi[l] - region.lo[l]) * detail::radical_inverse(i, detail::kHaltonPrimes[l]);
  return t;
}

struct GapStatistics {
  double sup_gap;
  double inf_gap;
  double spread() const { return sup_gap - inf_gap; }
};

/// Extremes of f1 - f2 over a deterministic Halton sample of the region plus
/// its corners. Both finite and a small spread indicate O(1)-equivalence.
template <class F1, class F2>
GapStatistics bounded_difference(const F1& f1, const F2& f2, const LogBox& region, std::size_t samples) {
  if (samples == 0) throw InputError("bounded_difference needs at least one sample");
  const auto r = region.lo.size();
  if (r == 0 || region.hi.size() != r) throw InputError("malformed sampling region");
  for (std::size_t l = 0; l < r; ++l)
    if (!std::isfinite(region.lo[l]) || !std::isfinite(region.hi[l]) || region.lo[l] > region.hi[l])
      throw InputError("sampling region bounds must be finite and ordered");

  GapStatistics g{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  auto visit = [&](std::span<const double> t) {
    double d = f1(t) - f2(t);
    g.sup_gap = std::max(g.sup_gap, d);
    g.inf_gap = std::min(g.inf_gap, d);
  };
  std::vector<double> corner(r);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << r); ++mask) {
    for (std::size_t l = 0; l < r; ++l) corner[l] = (mask >> l) & 1 ? region.hi[l] : region.lo[l];
    visit(corner);
  }
  for (std::uint64_t i = 1; i <= samples; ++i) visit(halton_point(region, i));
  return g;
}

}  // namespace minsing
