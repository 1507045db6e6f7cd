#pragma once

// Fiber integrals over C^r of
//
//   prod |z_l|^{2 t_l} e^{phi_1 + ... + phi_{r+1}}
//   ------------------------------------------------------------   (i dz ^ dzbar)^r
//   (|z_1|^2 e^{phi_1} + ... + |z_r|^2 e^{phi_r} + e^{phi_{r+1}})^{r+1+p}
//
// for constant phi. p = 1 is the Gamma closed form checked here, p = 0 is the
// fiber measure dP itself, and p = m gives the |z^l|^2 e^{-m phi_L} dP moments.
//
// Numerically the integral is reduced exactly as in the hand computation:
// polar angles z_l = a_l e^{i theta_l} (factor (2 pi)^r 2^r), the rescaling
// a_l = sqrt(A_{r+1}/A_l) b_l, hyperspherical coordinates on b, and sigma = s^2
// for the radial part. What is left is one radial and r-1 angular 1-D
// integrals, each done by adaptive Gauss-Kronrod.

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "minsing/errors.hpp"
#include "minsing/quadrature.hpp"

namespace minsing {

struct FiberProblem {
  int r = 1;
  std::vector<double> t;    // exponents t_1..t_r
  std::vector<double> phi;  // phi_1..phi_{r+1}, A_l = e^{phi_l}
};

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double sigma_max = 1.0;  // split between the direct and the inverted radial piece
  int panels = 4000;       // per 1-D integral
};

struct FiberResult {
  double value = 0.0;
  double rel_error = 0.0;  // quadrature error estimate, relative
  int panels_used = 0;
  double tail_bound = 0.0;  // analytic bound on the radial mass beyond sigma_max
};

inline constexpr double kGammaMinimum = 0.8856031944108887;  // min of Gamma on (0, inf)

namespace detail {

inline double sum_of(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

inline void check_shape(int r, const std::vector<double>& t, const std::vector<double>& phi) {
  if (r < 1) throw InputError("fiber dimension r must be >= 1");
  if (t.size() != static_cast<std::size_t>(r)) throw InputError("t must have length r");
  if (phi.size() != static_cast<std::size_t>(r) + 1) throw InputError("phi must have length r+1");
  for (double x : t)
    if (!std::isfinite(x)) throw InputError("t must be finite");
  for (double x : phi)
    if (!std::isfinite(x)) throw InputError("phi must be finite");
}

inline void check_spec(const QuadratureSpec& q) {
  if (!(q.rel_tol > 0)) throw InputError("rel_tol must be positive");
  if (!(q.sigma_max > 0) || !std::isfinite(q.sigma_max)) throw InputError("sigma_max must be positive");
  if (q.panels < 1) throw InputError("panel budget must be positive");
}

inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

// int_0^{pi/2} cos^pc(theta) sin^ps(theta) d theta, pc, ps > -1. Each half
// has at most one singular endpoint, at 0 after reflection.
inline QuadratureResult angular_integral(double pc, double ps, const QuadratureOptions& opt) {
  constexpr double quarter = std::numbers::pi / 4;
  auto near_zero_sin = [&](double th) { return std::pow(sinc(th), ps) * std::pow(std::cos(th), pc); };
  auto near_zero_cos = [&](double th) { return std::pow(sinc(th), pc) * std::pow(std::cos(th), ps); };
  auto lo = integrate_power_singular(ps, near_zero_sin, quarter, opt, "angular integral");
  auto hi = integrate_power_singular(pc, near_zero_cos, quarter, opt, "angular integral");
  return {lo.value + hi.value, lo.error + hi.error, lo.panels + hi.panels, true};
}

// int_0^inf sigma^a (1+sigma)^{-q} d sigma, split at S: the far piece uses
// u = 1/sigma and becomes int_0^{1/S} u^{q-a-2} (1+u)^{-q} du.
inline QuadratureResult radial_integral(double a, double q, double split, const QuadratureOptions& opt) {
  auto near = [&](double x) { return std::pow(1.0 + split * x, -q); };
  auto far = [&](double u) { return std::pow(1.0 + u, -q); };
  auto lo = integrate_power_singular(a, near, 1.0, opt, "radial integral");
  const double scale = std::pow(split, a + 1.0);
  auto hi = integrate_power_singular(q - a - 2.0, far, 1.0 / split, opt, "radial integral (tail)");
  return {scale * lo.value + hi.value, scale * lo.error + hi.error, lo.panels + hi.panels, true};
}

}  // namespace detail

/// Integral above with denominator power r+1+p, computed numerically.
/// Requires t_l > -1 and sum t < 1 + p.
inline FiberResult fiber_moment(int r, const std::vector<double>& t, const std::vector<double>& phi, double p,
                                const QuadratureSpec& q) {
  detail::check_shape(r, t, phi);
  detail::check_spec(q);
  for (double x : t)
    if (!(x > -1.0)) throw DomainError("fiber moment diverges: t_l must exceed -1");
  const double total = detail::sum_of(t);
  if (!(total < 1.0 + p)) throw DomainError("fiber moment diverges: sum t must be below 1 + p");

  QuadratureOptions opt{q.rel_tol * 0.1, 0.0, q.panels};
  const double power = r + 1 + p;
  const double radial_exp = r - 1 + total;

  FiberResult out;
  auto radial = detail::radial_integral(radial_exp, power, q.sigma_max, opt);
  double value = 0.5 * radial.value;
  double rel_err = radial.error / radial.value;
  out.panels_used += radial.panels;
  out.tail_bound = std::pow(q.sigma_max, radial_exp - power + 1.0) / (power - radial_exp - 1.0);

  for (int k = 1; k < r; ++k) {
    double pc = 1.0 + 2.0 * t[k - 1];
    double ps = r - 1 - k;
    for (int j = k; j < r; ++j) ps += 1.0 + 2.0 * t[j];
    auto ang = detail::angular_integral(pc, ps, opt);
    value *= ang.value;
    rel_err += ang.error / ang.value;
    out.panels_used += ang.panels;
  }

  // (2 pi)^r from the phases, 2^r from i dz^dzbar = 2 dx dy, and the Jacobian
  // of the rescaling collected into A_{r+1}^{sum t - p} prod A_l^{-t_l}.
  double log_a = (total - p) * phi[r];
  for (int l = 0; l < r; ++l) log_a -= t[l] * phi[l];
  out.value = std::pow(4.0 * std::numbers::pi, r) * std::exp(log_a) * value;
  out.rel_error = rel_err;
  return out;
}

inline void validate(const FiberProblem& p) {
  detail::check_shape(p.r, p.t, p.phi);
  for (double x : p.t)
    if (!(x > -1.0)) throw DomainError("Gamma(1 + t_l) has a pole: t_l must exceed -1");
  if (!(detail::sum_of(p.t) < 2.0)) throw DomainError("Gamma(2 - sum t) has a pole: sum t must be below 2");
}

/// Gamma(1+t_1), ..., Gamma(1+t_r), Gamma(2 - sum t).
inline std::vector<double> gamma_factors(const FiberProblem& p) {
  validate(p);
  std::vector<double> g;
  for (double x : p.t) g.push_back(std::tgamma(1.0 + x));
  g.push_back(std::tgamma(2.0 - detail::sum_of(p.t)));
  return g;
}

/// (2 pi)^r Gamma(1+t_1)...Gamma(1+t_r) Gamma(2 - sum t) / (Gamma(r+2) e^{phi_t}),
/// phi_t = sum t_l phi_l + (1 - sum t) phi_{r+1}.
inline double closed_form(const FiberProblem& p) {
  validate(p);
  const double total = detail::sum_of(p.t);
  double log_v = p.r * std::log(2.0 * std::numbers::pi) - std::lgamma(p.r + 2.0) + std::lgamma(2.0 - total);
  double phi_t = (1.0 - total) * p.phi[p.r];
  for (int l = 0; l < p.r; ++l) {
    log_v += std::lgamma(1.0 + p.t[l]);
    phi_t += p.t[l] * p.phi[l];
  }
  return std::exp(log_v - phi_t);
}

/// Left-hand side of the closed form, by quadrature. Throws ConvergenceError
/// when the panel budget is exhausted and DomainError outside the window.
inline FiberResult numeric_integral(const FiberProblem& p, const QuadratureSpec& q) {
  validate(p);
  return fiber_moment(p.r, p.t, p.phi, 1.0, q);
}

/// Total mass of the fiber measure dP (denominator power r+1).
inline FiberResult normalization_constant(int r, const std::vector<double>& phi, const QuadratureSpec& q) {
  return fiber_moment(r, std::vector<double>(static_cast<std::size_t>(std::max(r, 0)), 0.0), phi, 0.0, q);
}

namespace detail {

inline int total(const std::vector<int>& v) { return std::accumulate(v.begin(), v.end(), 0); }

// int_0^{2 pi} e^{i k theta} d theta by quadrature; returns |.|
inline double phase_integral(int k, const QuadratureOptions& opt) {
  auto re = integrate([k](double th) { return std::cos(k * th); }, 0.0, 2.0 * std::numbers::pi, opt);
  auto im = integrate([k](double th) { return std::sin(k * th); }, 0.0, 2.0 * std::numbers::pi, opt);
  return std::hypot(re.value, im.value);
}

}  // namespace detail

/// |<beta_l, beta_l'>| / (|beta_l| |beta_l'|) on one fiber, where
/// beta_l = z^l and the pairing is against e^{-m phi_L} dP with
/// m = max(|l|, |l'|). The phases are integrated numerically; the moduli
/// factor into fiber moments.
inline double orthogonality_check(int r, const std::vector<int>& ell, const std::vector<int>& ell_prime,
                                  const std::vector<double>& phi, const QuadratureSpec& q) {
  if (ell.size() != static_cast<std::size_t>(r) || ell_prime.size() != static_cast<std::size_t>(r))
    throw InputError("multi-indices must have length r");
  for (int i = 0; i < r; ++i)
    if (ell[i] < 0 || ell_prime[i] < 0) throw InputError("multi-index entries must be non-negative");
  const double m = std::max(detail::total(ell), detail::total(ell_prime));

  QuadratureOptions opt{1e-14, 1e-15, q.panels};
  double phase = 1.0;
  for (int i = 0; i < r; ++i) phase *= detail::phase_integral(ell[i] - ell_prime[i], opt) / (2.0 * std::numbers::pi);

  std::vector<double> t_mid(r), t_a(r), t_b(r);
  for (int i = 0; i < r; ++i) {
    t_mid[i] = 0.5 * (ell[i] + ell_prime[i]);
    t_a[i] = ell[i];
    t_b[i] = ell_prime[i];
  }
  const double cross = fiber_moment(r, t_mid, phi, m, q).value;
  const double na = fiber_moment(r, t_a, phi, m, q).value;
  const double nb = fiber_moment(r, t_b, phi, m, q).value;
  return phase * cross / std::sqrt(na * nb);
}

struct HolderSides {
  double lhs;
  double rhs;
};

/// lhs = int |z^l|^{2/m} e^{-phi_L} dP,
/// rhs = (int |z^l|^2 e^{-m phi_L} dP)^{1/m} (int dP)^{(m-1)/m}.
inline HolderSides holder_check(int r, int m, const std::vector<int>& ell, const std::vector<double>& phi,
                                const QuadratureSpec& q) {
  if (m < 1) throw InputError("m must be positive");
  if (ell.size() != static_cast<std::size_t>(r)) throw InputError("multi-index must have length r");
  for (int x : ell)
    if (x < 0) throw InputError("multi-index entries must be non-negative");
  if (detail::total(ell) > m) throw InputError("need |l| <= m");

  std::vector<double> t_frac(r), t_int(r);
  for (int i = 0; i < r; ++i) {
    t_frac[i] = static_cast<double>(ell[i]) / m;
    t_int[i] = ell[i];
  }
  const double lhs = fiber_moment(r, t_frac, phi, 1.0, q).value;
  const double moment = fiber_moment(r, t_int, phi, m, q).value;
  const double mass = normalization_constant(r, phi, q).value;
  return {lhs, std::pow(moment, 1.0 / m) * std::pow(mass, (m - 1.0) / m)};
}

/// Uniform draw of t from the window {t_l > -1, sum t < 2}, kept `margin`
/// away from its boundary, by rejection from the box (-1, 2)^r.
template <class Rng>
std::vector<double> sample_window(int r, Rng& rng, double margin = 0.05) {
  if (r < 1) throw InputError("r must be positive");
  std::uniform_real_distribution<double> u(-1.0 + margin, 2.0 - margin);
  std::vector<double> t(static_cast<std::size_t>(r));
  while (true) {
    for (auto& x : t) x = u(rng);
    if (detail::sum_of(t) < 2.0 - margin) return t;
  }
}

}  // namespace minsing
