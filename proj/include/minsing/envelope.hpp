#pragma once

// Circle-invariant metrics on O(k) over the Riemann sphere. In t = log|z|^2
// a weight phi(t) is psh iff convex, and a global weight of O(k) has slopes in
// [0, k]. This turns the equilibrium envelope V_theta into a constrained
// convex minorant and the Bergman weights into weighted moment sums over the
// monomials z^j, j = 0..mk.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minsing/errors.hpp"
#include "minsing/quadrature.hpp"
#include "minsing/rational.hpp"

namespace minsing {

struct UniformGrid {
  double lo = -40.0;
  double hi = 40.0;
  std::size_t n = 4096;  // number of points, >= 3

  double step() const { return (hi - lo) / static_cast<double>(n - 1); }
  double at(std::size_t i) const {
    return i + 1 == n ? hi : lo + static_cast<double>(i) * step();
  }
  void validate() const {
    if (n < 3) throw InputError("grid needs at least 3 points");
    if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) throw InputError("grid bounds must satisfy lo < hi");
  }
  friend bool operator==(const UniformGrid&, const UniformGrid&) = default;
};

/// phi sampled on a uniform grid, as a weight of a line bundle of the given
/// (rational) degree.
struct RadialWeight {
  Rational degree;
  UniformGrid grid;
  std::vector<double> values;
  std::string label;

  double degree_value() const { return to_double(degree); }
  double left_slope() const { return (values[1] - values[0]) / grid.step(); }
  double right_slope() const { return (values[grid.n - 1] - values[grid.n - 2]) / grid.step(); }

  void validate() const {
    grid.validate();
    if (degree < 0) throw InputError("weight degree must be non-negative");
    if (values.size() != grid.n) throw InputError("weight has " + std::to_string(values.size()) +
                                                  " values for a grid of " + std::to_string(grid.n));
    for (double v : values)
      if (!std::isfinite(v)) throw InputError("weight values must be finite");
  }

  /// End slopes within [-eps, k + eps]: the sampled function can be the
  /// restriction of a global weight.
  bool admissible(double eps = 1e-6) const {
    const double k = degree_value();
    auto ok = [&](double s) { return s >= -eps && s <= k + eps; };
    return ok(left_slope()) && ok(right_slope());
  }

  RadialWeight shifted(double c) const {
    auto out = *this;
    for (auto& v : out.values) v += c;
    return out;
  }
};

inline double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

template <class F>
RadialWeight sample_weight(const Rational& degree, const UniformGrid& grid, F&& f, std::string label = "sampled") {
  grid.validate();
  RadialWeight w{degree, grid, {}, std::move(label)};
  w.values.reserve(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) w.values.push_back(f(grid.at(i)));
  return w;
}

/// k log(1 + e^t), the Fubini-Study weight of O(k).
inline RadialWeight fubini_study(const Rational& k, const UniformGrid& grid) {
  const double kd = to_double(k);
  return sample_weight(k, grid, [kd](double t) { return kd * softplus(t); }, "fubini_study");
}

/// k log(1 + e^t) - amplitude e^{-t^2}: non-convex near t = 0 once the
/// amplitude beats the Fubini-Study curvature.
inline RadialWeight bump_weight(const Rational& k, const UniformGrid& grid, double amplitude = 1.0) {
  const double kd = to_double(k);
  return sample_weight(
      k, grid, [=](double t) { return kd * softplus(t) - amplitude * std::exp(-t * t); }, "bump");
}

struct EnvelopeResult {
  RadialWeight v;             // V_theta on the grid
  std::vector<bool> contact;  // V_theta = 0
};

namespace detail {

// Lower convex hull of (t_i, y_i) by monotone chain; returns vertex indices.
inline std::vector<std::size_t> lower_hull(const UniformGrid& g, const std::vector<double>& y) {
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < g.n; ++i) {
    while (hull.size() >= 2) {
      auto a = hull[hull.size() - 2], b = hull.back();
      // drop b when it lies on or above the chord a -> i
      double cross = (g.at(b) - g.at(a)) * (y[i] - y[a]) - (y[b] - y[a]) * (g.at(i) - g.at(a));
      if (cross <= 0) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }
  return hull;
}

}  // namespace detail

/// Largest g <= phi on the grid that is convex with slopes in [0, k]
/// (the restricted biconjugate of phi). Returns g.
inline std::vector<double> constrained_minorant(const UniformGrid& grid, const std::vector<double>& phi, double k) {
  auto hull = detail::lower_hull(grid, phi);
  // Supporting points of the lines with slope 0 and slope k.
  std::size_t left = hull.front(), right = hull.front();
  for (auto i : hull) {
    if (phi[i] < phi[left]) left = i;
    if (phi[i] - k * grid.at(i) <= phi[right] - k * grid.at(right)) right = i;
  }
  std::vector<double> g(grid.n);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < grid.n; ++i) {
    if (i <= left) {
      g[i] = phi[left];
    } else if (i >= right) {
      g[i] = phi[right] + k * (grid.at(i) - grid.at(right));
    } else {
      while (hull[seg + 1] < i) ++seg;
      auto a = hull[seg], b = hull[seg + 1];
      if (i == a) {
        g[i] = phi[a];
      } else if (i == b) {
        g[i] = phi[b];
      } else {
        double w = (grid.at(i) - grid.at(a)) / (grid.at(b) - grid.at(a));
        g[i] = (1.0 - w) * phi[a] + w * phi[b];
      }
    }
  }
  return g;
}

inline EnvelopeResult equilibrium_envelope(const RadialWeight& w) {
  w.validate();
  auto g = constrained_minorant(w.grid, w.values, w.degree_value());
  EnvelopeResult out{RadialWeight{w.degree, w.grid, std::vector<double>(w.grid.n), w.label + ":V_theta"},
                     std::vector<bool>(w.grid.n)};
  for (std::size_t i = 0; i < w.grid.n; ++i) {
    double v = std::min(0.0, g[i] - w.values[i]);
    out.v.values[i] = v;
    out.contact[i] = v >= -1e-12 * (1.0 + std::abs(w.values[i]));
  }
  return out;
}

struct BergmanResult {
  int m = 1;
  std::vector<double> log_norms;  // log ||z^j||^2, j = 0..mk
  RadialWeight v_b;               // V_{phi,B,m}
  std::vector<double> norms() const {
    std::vector<double> out;
    for (double x : log_norms) out.push_back(std::exp(x));
    return out;
  }
};

namespace detail {

inline double log_sum_exp(const std::vector<double>& xs) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double x : xs) mx = std::max(mx, x);
  if (!std::isfinite(mx)) return mx;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - mx);
  return mx + std::log(s);
}

// Composite Simpson weights for n points (3/8 rule on the last three
// intervals when the interval count is odd).
inline std::vector<double> simpson_weights(std::size_t n, double h) {
  std::vector<double> w(n, 0.0);
  const std::size_t intervals = n - 1;
  std::size_t simpson_end = intervals % 2 == 0 ? intervals : intervals - 3;
  for (std::size_t i = 0; i + 2 <= simpson_end; i += 2) {
    w[i] += h / 3;
    w[i + 1] += 4 * h / 3;
    w[i + 2] += h / 3;
  }
  if (simpson_end != intervals) {
    const std::size_t i = simpson_end;
    w[i] += 3 * h / 8;
    w[i + 1] += 9 * h / 8;
    w[i + 2] += 9 * h / 8;
    w[i + 3] += 3 * h / 8;
  }
  return w;
}

// log of int_0^inf exp(-c x + 2 softplus(t0) - 2 softplus(t0 + dir x)) dx:
// the integrand beyond the window edge t0 relative to its value at t0, for a
// linearly continued weight. dir = -1 (left), +1 (right); `decay` is the
// effective exponential rate including the FS density.
inline double log_tail(double c, double decay, double t0, double dir) {
  auto f = [&](double x) { return std::exp(-c * x + 2.0 * (softplus(t0) - softplus(t0 + dir * x))); };
  QuadratureOptions opt{1e-12, 0.0, 2000};
  const double span = 745.0 / decay;
  auto res = integrate_or_throw(f, 0.0, std::min(span, 1e6), opt, "Bergman tail integral");
  return std::log(res.value);
}

}  // namespace detail

/// Bergman weight for sections of O(mk) normalised in L^2(e^{-m phi} dV),
/// dV the Fubini-Study form of total mass 1, which in t reads
/// e^t / (1+e^t)^2 dt. By circle invariance the monomials are orthogonal and
///   V_{phi,B,m}(t) = (1/m) log sum_j e^{j t} / ||z^j||^2 - phi(t).
/// Outside the grid phi is continued linearly with its end slopes.
inline BergmanResult bergman_weight(const RadialWeight& w, int m) {
  w.validate();
  if (m < 1) throw InputError("m must be a positive integer");
  Rational mk = w.degree * m;
  if (denominator(mk) != 1) throw InputError("m*k = " + to_string(mk) + " is not an integer");
  const int top = numerator(mk).convert_to<int>();
  const auto& g = w.grid;
  const double h = g.step();
  const auto weights = detail::simpson_weights(g.n, h);
  const double sl = w.left_slope(), sr = w.right_slope();

  BergmanResult out;
  out.m = m;
  std::vector<double> terms(g.n);
  for (int j = 0; j <= top; ++j) {
    auto exponent = [&](std::size_t i) {
      double t = g.at(i);
      return j * t - m * w.values[i] + t - 2.0 * softplus(t);
    };
    for (std::size_t i = 0; i < g.n; ++i) terms[i] = exponent(i) + std::log(weights[i]);
    double inner = detail::log_sum_exp(terms);

    // Exponential decay rates of the integrand beyond each end.
    double left_rate = j + 1.0 - m * sl;
    double right_rate = m * sr + 1.0 - j;
    if (!(left_rate > 0) || !(right_rate > 0))
      throw DomainError("||z^" + std::to_string(j) + "||^2 diverges for the end slopes of '" + w.label + "'");
    double left = exponent(0) + detail::log_tail(left_rate, left_rate, g.lo, -1.0);
    double right = exponent(g.n - 1) + detail::log_tail(m * sr - j - 1.0, right_rate, g.hi, +1.0);
    out.log_norms.push_back(detail::log_sum_exp({inner, left, right}));
  }

  out.v_b = RadialWeight{w.degree, g, std::vector<double>(g.n), w.label + ":V_B" + std::to_string(m)};
  std::vector<double> kernel(out.log_norms.size());
  for (std::size_t i = 0; i < g.n; ++i) {
    double t = g.at(i);
    for (int j = 0; j <= top; ++j) kernel[j] = j * t - out.log_norms[j];
    out.v_b.values[i] = detail::log_sum_exp(kernel) / m - w.values[i];
  }
  return out;
}

struct SandwichRow {
  int m;
  double lower_violation;  // sup(V_theta - v_b), should be <= 0 up to tolerance
  double gap;              // sup(v_b - V_theta), finite
};

struct SandwichReport {
  std::vector<SandwichRow> rows;
  double proxy_violation;  // sup(V_theta - max_m v_b)
  bool gap_nonincreasing;
  EnvelopeResult envelope;
  std::vector<BergmanResult> bergman;
};

/// Both sides of V_B - C <= V_theta <= V_B, with the sup over m replaced by
/// the max over m_list.
inline SandwichReport sandwich_report(const RadialWeight& w, const std::vector<int>& m_list) {
  if (m_list.empty()) throw InputError("m_list must not be empty");
  SandwichReport rep{{}, 0.0, true, equilibrium_envelope(w), {}};
  const auto n = w.grid.n;
  std::vector<double> best(n, -std::numeric_limits<double>::infinity());
  for (int m : m_list) {
    auto b = bergman_weight(w, m);
    SandwichRow row{m, -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < n; ++i) {
      double d = b.v_b.values[i] - rep.envelope.v.values[i];
      row.lower_violation = std::max(row.lower_violation, -d);
      row.gap = std::max(row.gap, d);
      best[i] = std::max(best[i], b.v_b.values[i]);
    }
    if (!rep.rows.empty() && row.gap > rep.rows.back().gap) rep.gap_nonincreasing = false;
    rep.rows.push_back(row);
    rep.bergman.push_back(std::move(b));
  }
  rep.proxy_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    rep.proxy_violation = std::max(rep.proxy_violation, rep.envelope.v.values[i] - best[i]);
  return rep;
}

inline Rational total_of(const RationalVector& v) {
  Rational s = 0;
  for (const auto& x : v) s += x;
  return s;
}

/// phi_alpha = sum alpha_l phi_l + (1 - |alpha|) phi_{r+1}, degree mixed alike.
inline RadialWeight mixed_weight(const std::vector<RadialWeight>& weights, const RationalVector& alpha) {
  if (weights.size() < 2) throw InputError("mixed_weight needs r+1 >= 2 weights");
  const auto r = weights.size() - 1;
  if (alpha.size() != r) throw InputError("alpha must have length r = " + std::to_string(r));
  for (const auto& a : alpha)
    if (a < 0) throw InputError("alpha must be non-negative");
  const Rational rest = 1 - total_of(alpha);
  if (rest < 0) throw InputError("alpha must satisfy |alpha| <= 1");
  for (const auto& w : weights) {
    w.validate();
    if (!(w.grid == weights.front().grid)) throw InputError("weights must share one grid");
  }

  RationalVector coef = alpha;
  coef.push_back(rest);
  RadialWeight out{0, weights.front().grid, std::vector<double>(weights.front().grid.n, 0.0), "mixed"};
  for (std::size_t l = 0; l <= r; ++l) {
    if (coef[l] == 0) continue;
    out.degree += coef[l] * weights[l].degree;
    const double c = to_double(coef[l]);
    for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] += c * weights[l].values[i];
  }
  return out;
}

/// V_alpha of the mixed weight.
inline RadialWeight mixed_envelope(const std::vector<RadialWeight>& weights, const RationalVector& alpha) {
  return equilibrium_envelope(mixed_weight(weights, alpha)).v;
}

struct MonotonicityResult {
  bool passed;
  double max_violation;  // max of V_alpha/(1-|alpha|) - V_beta/(1-|beta|), clipped at 0
};

/// V_alpha / (1 - |alpha|) <= V_beta / (1 - |beta|) for alpha <= beta.
inline MonotonicityResult monotonicity_check(const std::vector<RadialWeight>& weights, const RationalVector& alpha,
                                             const RationalVector& beta, double tol = 1e-7) {
  if (alpha.size() != beta.size()) throw InputError("alpha and beta must have equal length");
  for (std::size_t l = 0; l < alpha.size(); ++l)
    if (alpha[l] > beta[l]) throw InputError("monotonicity needs alpha <= beta componentwise");
  const double ca = to_double(1 - total_of(alpha)), cb = to_double(1 - total_of(beta));
  if (!(cb > 0)) throw InputError("monotonicity needs |beta| < 1");
  auto va = mixed_envelope(weights, alpha);
  auto vb = mixed_envelope(weights, beta);
  double worst = 0.0;
  for (std::size_t i = 0; i < va.values.size(); ++i)
    worst = std::max(worst, va.values[i] / ca - vb.values[i] / cb);
  return {worst <= tol, worst};
}

/// sup |V_beta/(1-|beta|) - V_alpha/(1-|alpha|)| for beta = alpha + eps (1,..,1),
/// one entry per eps.
inline std::vector<double> limit_gaps(const std::vector<RadialWeight>& weights, const RationalVector& alpha,
                                      const std::vector<Rational>& eps_list) {
  auto va = mixed_envelope(weights, alpha);
  const double ca = to_double(1 - total_of(alpha));
  std::vector<double> gaps;
  for (const auto& eps : eps_list) {
    auto beta = alpha;
    for (auto& b : beta) b += eps;
    auto vb = mixed_envelope(weights, beta);
    const double cb = to_double(1 - total_of(beta));
    double worst = 0.0;
    for (std::size_t i = 0; i < va.values.size(); ++i)
      worst = std::max(worst, std::abs(vb.values[i] / cb - va.values[i] / ca));
    gaps.push_back(worst);
  }
  return gaps;
}

}  // namespace minsing
