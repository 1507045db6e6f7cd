#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature with a global error queue and a
// hard panel budget, plus a helper for integrands with an x^a endpoint
// singularity.

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "minsing/errors.hpp"

namespace minsing {

struct QuadratureOptions {
  double rel_tol = 1e-12;
  double abs_tol = 0.0;
  int max_panels = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int panels = 0;
  bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

template <class F>
Panel gauss_kronrod_panel(const F& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double fc = f(c);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    double dx = h * kKronrodNodes[j];
    double s = f(c - dx) + f(c + dx);
    kronrod += kKronrodWeights[j] * s;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * s;
  }
  return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

}  // namespace detail

/// Integrates f over [a, b]. Does not throw on budget exhaustion; inspect
/// `converged`.
template <class F>
QuadratureResult integrate(const F& f, double a, double b, const QuadratureOptions& opt = {}) {
  std::priority_queue<detail::Panel> queue;
  auto first = detail::gauss_kronrod_panel(f, a, b);
  queue.push(first);
  double value = first.value, error = first.error;
  int panels = 1;
  auto done = [&] { return error <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value)); };
  while (!done() && panels < opt.max_panels) {
    auto worst = queue.top();
    queue.pop();
    double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval exhausted at double precision
      queue.push(worst);
      break;
    }
    auto left = detail::gauss_kronrod_panel(f, worst.a, mid);
    auto right = detail::gauss_kronrod_panel(f, mid, worst.b);
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++panels;
  }
  // Re-sum from the panels to drop accumulated update round-off; the summation
  // order is deterministic (ordered by a).
  std::vector<detail::Panel> all;
  all.reserve(queue.size());
  while (!queue.empty()) {
    all.push_back(queue.top());
    queue.pop();
  }
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  value = 0.0;
  error = 0.0;
  for (const auto& p : all) {
    value += p.value;
    error += p.error;
  }
  return {value, error, panels, done()};
}

template <class F>
QuadratureResult integrate_or_throw(const F& f, double a, double b, const QuadratureOptions& opt,
                                    const std::string& what) {
  auto res = integrate(f, a, b, opt);
  if (!res.converged)
    throw ConvergenceError(what + ": tolerance not reached within " + std::to_string(opt.max_panels) + " panels",
                           res.value, res.error, res.panels);
  return res;
}

/// Integral of x^a h(x) over [0, c] for a > -1 and h smooth on [0, c].
/// For a < 0 the substitution x = c u^{1/(a+1)} turns the integrand into the
/// bounded (c^{a+1}/(a+1)) h(c u^{1/(a+1)}).
template <class H>
QuadratureResult integrate_power_singular(double a, const H& h, double c, const QuadratureOptions& opt,
                                          const std::string& what) {
  if (!(a > -1.0)) throw DomainError(what + ": endpoint exponent must exceed -1");
  if (a < 0.0) {
    const double k = 1.0 / (a + 1.0);
    const double scale = std::pow(c, a + 1.0) / (a + 1.0);
    auto mapped = [&](double u) { return h(c * std::pow(u, k)); };
    auto res = integrate_or_throw(mapped, 0.0, 1.0, opt, what);
    res.value *= scale;
    res.error *= scale;
    return res;
  }
  auto direct = [&](double x) { return std::pow(x, a) * h(x); };
  return integrate_or_throw(direct, 0.0, c, opt, what);
}

}  // namespace minsing
