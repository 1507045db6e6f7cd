#pragma once

// Toy model of the maximum over Box_L on a projective-bundle neighbourhood:
// circle-invariant weights on a one-dimensional base, r fiber coordinates,
//
//   W(t_fiber, t_base) = max_{alpha in Box_L} <alpha, t_fiber> + (phi_alpha + V_alpha)(t_base),
//
// which is V-hat written as a weight (V-hat + phi_L). Also the discrete psh
// test for such samples and the max-gluing of a local weight into a global one.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "minsing/box_polytope.hpp"
#include "minsing/envelope.hpp"
#include "minsing/errors.hpp"
#include "minsing/rational.hpp"

namespace minsing {

/// Values on a tensor grid, last axis fastest.
struct GridFunction {
  std::vector<UniformGrid> axes;
  std::vector<double> values;

  std::size_t size() const {
    std::size_t s = 1;
    for (const auto& a : axes) s *= a.n;
    return s;
  }
  std::vector<std::size_t> strides() const {
    std::vector<std::size_t> s(axes.size(), 1);
    for (std::size_t d = axes.size(); d-- > 1;) s[d - 1] = s[d] * axes[d].n;
    return s;
  }
  std::vector<std::size_t> unravel(std::size_t flat) const {
    std::vector<std::size_t> idx(axes.size());
    for (std::size_t d = axes.size(); d-- > 0;) {
      idx[d] = flat % axes[d].n;
      flat /= axes[d].n;
    }
    return idx;
  }
  std::vector<double> point(std::size_t flat) const {
    auto idx = unravel(flat);
    std::vector<double> p(axes.size());
    for (std::size_t d = 0; d < axes.size(); ++d) p[d] = axes[d].at(idx[d]);
    return p;
  }
};

template <class F>
GridFunction sample_grid(std::vector<UniformGrid> axes, F&& f) {
  GridFunction g{std::move(axes), {}};
  for (const auto& a : g.axes) a.validate();
  g.values.resize(g.size());
  for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] = f(g.point(i));
  return g;
}

/// Box_L vertices together with the lattice points {i / density} of the
/// simplex that lie in Box_L; doubling the density refines the set.
inline std::vector<RationalVector> alpha_grid(const BoxPolytope& box, int density) {
  if (density < 1) throw InputError("alpha grid density must be positive");
  auto pts = vertices_of(box);
  const auto r = box.dimension();
  std::vector<int> idx(r, 0);
  while (true) {
    int s = 0;
    for (int x : idx) s += x;
    if (s <= density) {
      RationalVector a(r);
      for (std::size_t l = 0; l < r; ++l) a[l] = Rational(idx[l], density);
      if (box.contains(a)) pts.push_back(std::move(a));
    }
    std::size_t d = 0;
    while (d < r && ++idx[d] > density) idx[d++] = 0;
    if (d == r) break;
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

struct VhatResult {
  GridFunction weight;                      // W on fiber axes x base axis
  std::vector<RationalVector> alphas;       // the alpha grid used
  std::vector<std::vector<double>> member;  // phi_alpha + V_alpha on the base grid, per alpha
  std::vector<std::size_t> argmax;          // maximising alpha index per grid point
};

/// `weights` are phi_1..phi_{r+1} on the base grid. The result samples W on
/// fiber_axes (one per fiber coordinate) times the base grid.
inline VhatResult vhat_toy(const std::vector<RadialWeight>& weights, const BoxPolytope& box, int density,
                           const std::vector<UniformGrid>& fiber_axes) {
  const auto r = box.dimension();
  if (weights.size() != r + 1) throw InputError("vhat_toy needs r+1 base weights");
  if (fiber_axes.size() != r) throw InputError("vhat_toy needs one fiber axis per coordinate");
  if (is_empty(box)) throw InputError("Box_L is empty (infeasible)");

  VhatResult out;
  out.alphas = alpha_grid(box, density);
  for (const auto& a : out.alphas) {
    auto mixed = mixed_weight(weights, a);
    auto env = equilibrium_envelope(mixed);
    std::vector<double> g(mixed.values.size());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = mixed.values[i] + env.v.values[i];
    out.member.push_back(std::move(g));
  }

  std::vector<std::vector<double>> slopes;
  for (const auto& a : out.alphas) {
    slopes.emplace_back();
    for (const auto& x : a) slopes.back().push_back(to_double(x));
  }

  auto axes = fiber_axes;
  axes.push_back(weights.front().grid);
  out.weight = GridFunction{axes, {}};
  const auto total = out.weight.size();
  out.weight.values.assign(total, -std::numeric_limits<double>::infinity());
  out.argmax.assign(total, 0);
  const auto nb = weights.front().grid.n;
  const auto nf = total / nb;
  for (std::size_t f = 0; f < nf; ++f) {
    auto tf = out.weight.point(f * nb);
    for (std::size_t k = 0; k < out.alphas.size(); ++k) {
      double lin = 0.0;
      for (std::size_t l = 0; l < r; ++l) lin += slopes[k][l] * tf[l];
      for (std::size_t b = 0; b < nb; ++b) {
        double v = lin + out.member[k][b];
        auto& cur = out.weight.values[f * nb + b];
        if (v > cur) {
          cur = v;
          out.argmax[f * nb + b] = k;
        }
      }
    }
  }
  return out;
}

struct ConvexityResult {
  bool passed;
  double worst_violation;
};

/// Discrete psh test for circle-invariant samples: midpoint convexity along
/// every axis and every 2-D diagonal (violation measured as negative
/// directional second difference over the squared step), and slopes within
/// [0, budget] along each axis at both ends of every line.
inline ConvexityResult psh_convexity_check(const GridFunction& g, const std::vector<double>& slope_budget,
                                           double tol = 1e-6) {
  const auto dims = g.axes.size();
  if (slope_budget.size() != dims) throw InputError("need one slope budget per axis");
  if (g.values.size() != g.size()) throw InputError("grid function has the wrong number of values");
  for (double v : g.values)
    if (!std::isfinite(v)) throw InputError("grid function must be finite");

  const auto stride = g.strides();
  double worst = 0.0;
  std::vector<int> dir(dims);

  auto check_direction = [&](const std::vector<int>& step) {
    double len2 = 0.0;
    for (std::size_t d = 0; d < dims; ++d) len2 += step[d] * step[d] * g.axes[d].step() * g.axes[d].step();
    for (std::size_t flat = 0; flat < g.values.size(); ++flat) {
      auto idx = g.unravel(flat);
      bool inside = true;
      std::ptrdiff_t offset = 0;
      for (std::size_t d = 0; d < dims && inside; ++d) {
        auto lo = static_cast<std::ptrdiff_t>(idx[d]) - step[d];
        auto hi = static_cast<std::ptrdiff_t>(idx[d]) + step[d];
        inside = lo >= 0 && hi >= 0 && lo < static_cast<std::ptrdiff_t>(g.axes[d].n) &&
                 hi < static_cast<std::ptrdiff_t>(g.axes[d].n);
        offset += step[d] * static_cast<std::ptrdiff_t>(stride[d]);
      }
      if (!inside) continue;
      double second = g.values[flat - offset] + g.values[flat + offset] - 2.0 * g.values[flat];
      worst = std::max(worst, -second / len2);
    }
  };

  for (std::size_t a = 0; a < dims; ++a) {
    std::fill(dir.begin(), dir.end(), 0);
    dir[a] = 1;
    check_direction(dir);
    for (std::size_t b = a + 1; b < dims; ++b) {
      dir[b] = 1;
      check_direction(dir);
      dir[b] = -1;
      check_direction(dir);
      dir[b] = 0;
    }
  }

  for (std::size_t a = 0; a < dims; ++a) {
    const auto n = g.axes[a].n;
    const double h = g.axes[a].step();
    for (std::size_t flat = 0; flat < g.values.size(); ++flat) {
      if (g.unravel(flat)[a] != 0) continue;
      double first = (g.values[flat + stride[a]] - g.values[flat]) / h;
      double last = (g.values[flat + (n - 1) * stride[a]] - g.values[flat + (n - 2) * stride[a]]) / h;
      for (double s : {first, last}) worst = std::max({worst, -s, s - slope_budget[a]});
    }
  }
  return {worst <= tol, worst};
}

inline GridFunction as_grid_function(const RadialWeight& w) { return GridFunction{{w.grid}, w.values}; }

struct GlueResult {
  RadialWeight weight;
  double c1;  // -inf of the outer weight over the collar
};

/// max(inner - C1, outer) on the inner window and outer elsewhere, with
/// C1 = -inf_{collar} outer. The collar is the part of the window within
/// `collar_width` of its ends. Needs inner <= 0 on the collar, so that the
/// result coincides with outer there.
inline GlueResult glue_max(const RadialWeight& inner, const RadialWeight& outer, double collar_width) {
  inner.validate();
  outer.validate();
  const double h = outer.grid.step();
  if (std::abs(inner.grid.step() - h) > 1e-9 * h) throw InputError("inner and outer grids must share a step");
  const double shift = (inner.grid.lo - outer.grid.lo) / h;
  const auto first = static_cast<std::ptrdiff_t>(std::llround(shift));
  if (std::abs(shift - static_cast<double>(first)) > 1e-6 || first < 0 ||
      static_cast<std::size_t>(first) + inner.grid.n > outer.grid.n)
    throw InputError("inner window must be aligned with and contained in the outer grid");
  if (!(collar_width > 0)) throw InputError("collar width must be positive");

  std::vector<std::size_t> collar;
  const double eps = 1e-9 * h;
  for (std::size_t i = 0; i < inner.grid.n; ++i) {
    double t = inner.grid.at(i);
    if (t <= inner.grid.lo + collar_width + eps || t >= inner.grid.hi - collar_width - eps) collar.push_back(i);
  }
  if (collar.empty()) throw InputError("collar is empty");

  double inf_outer = std::numeric_limits<double>::infinity();
  for (auto i : collar) {
    if (inner.values[i] > 0.0) throw InputError("inner weight must be <= 0 on the collar");
    inf_outer = std::min(inf_outer, outer.values[static_cast<std::size_t>(first) + i]);
  }
  const double c1 = -inf_outer;

  GlueResult out{outer, c1};
  out.weight.label = "glued";
  for (std::size_t i = 0; i < inner.grid.n; ++i) {
    auto& v = out.weight.values[static_cast<std::size_t>(first) + i];
    v = std::max(inner.values[i] - c1, v);
  }
  return out;
}

}  // namespace minsing
