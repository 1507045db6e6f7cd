#pragma once

// Runs one problem and collects a JSON record plus CSV tables. The record
// holds no wall time and no output paths, so reruns are byte-identical.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "minsing/box_polytope.hpp"
#include "minsing/envelope.hpp"
#include "minsing/errors.hpp"
#include "minsing/fiber_integral.hpp"
#include "minsing/ns_geometry.hpp"
#include "minsing/problem_file.hpp"
#include "minsing/rational.hpp"
#include "minsing/tropical_weight.hpp"
#include "minsing/vhat.hpp"

#ifndef MINSING_VERSION
#define MINSING_VERSION "0.0.0"
#endif

namespace minsing {

using Json = nlohmann::ordered_json;

struct RunOptions {
  std::optional<double> tol;  // overrides the per-kind default threshold
  std::uint64_t seed = 0;
};

struct Table {
  std::string name;  // file stem
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + cells[i];
      out += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out;
  }
};

struct RunReport {
  Json record;
  std::vector<Table> tables;
  int exit_code = 0;  // 0 ok, 1 tolerance failure, 2 error
};

namespace detail {

inline Json rationals_json(const RationalVector& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

inline std::string alpha_cell(const RationalVector& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + to_string(v[i]);
  return s;
}

inline Json reals_json(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

inline Json halfspaces_json(const BoxPolytope& box) {
  Json a = Json::array();
  for (const auto& h : box.halfspaces()) a.push_back({{"normal", rationals_json(h.normal)}, {"offset", to_string(h.offset)}});
  return a;
}

inline Json optional_rational(const std::optional<Rational>& q) {
  return q ? Json(to_string(*q)) : Json(nullptr);
}

class Checks {
 public:
  void add(const std::string& name, bool passed, double value, double limit) {
    list_.push_back({{"name", name}, {"passed", passed}, {"value", finite_or_string(value)},
                     {"limit", finite_or_string(limit)}});
    failed_ = failed_ || !passed;
  }
  void add_exact(const std::string& name, bool passed, const std::string& value, const std::string& expected) {
    list_.push_back({{"name", name}, {"passed", passed}, {"value", value}, {"expected", expected}});
    failed_ = failed_ || !passed;
  }
  bool failed() const { return failed_; }
  const Json& json() const { return list_; }

 private:
  static Json finite_or_string(double x) {
    if (std::isfinite(x)) return x;
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  }
  Json list_ = Json::array();
  bool failed_ = false;
};

inline Json tropical_json(const TropicalWeight& w) {
  Json a = Json::array();
  for (const auto& p : w.pieces()) a.push_back({{"alpha", rationals_json(p.alpha)}, {"offset", p.offset}});
  return a;
}

inline Table vertex_table(const std::vector<RationalVector>& verts, std::size_t r) {
  Table t{"vertices", {}, {}};
  for (std::size_t l = 0; l < r; ++l) t.header.push_back("alpha_" + std::to_string(l + 1));
  t.header.push_back("total");
  for (const auto& v : verts) {
    std::vector<std::string> row;
    for (const auto& x : v) row.push_back(to_string(x));
    row.push_back(to_string(sum(v)));
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline BoxPolytope box_from_keys(const ProblemFile& pf) {
  const auto& rank_entry = pf.require("rank");
  const auto rank = pf.integer(rank_entry);
  if (rank < 1) pf.fail(rank_entry, "must be positive");
  const auto n = static_cast<std::size_t>(rank);

  std::vector<RationalVector> cone;
  for (const auto* e : pf.all("cone")) {
    auto v = pf.rationals(*e);
    if (v.size() != n)
      pf.fail(*e, "cone functional has " + std::to_string(v.size()) + " entries but rank is " + std::to_string(n));
    cone.push_back(std::move(v));
  }
  const auto& lr = pf.require("l_restr");
  DivisorClass l_restr{pf.rationals(lr), std::string("L|_Y")};
  if (l_restr.rank() != n)
    pf.fail(lr, "class has " + std::to_string(l_restr.rank()) + " entries but rank is " + std::to_string(n));
  std::vector<DivisorClass> conormals;
  for (const auto* e : pf.all("conormal")) {
    DivisorClass c{pf.rationals(*e), std::nullopt};
    if (c.rank() != n)
      pf.fail(*e, "class has " + std::to_string(c.rank()) + " entries but rank is " + std::to_string(n));
    conormals.push_back(std::move(c));
  }
  if (conormals.empty()) pf.fail("missing required key 'conormal'");
  if (conormals.size() > kMaxBoxDimension)
    throw UnsupportedDimension("Box_L vertex enumeration supports r <= " + std::to_string(kMaxBoxDimension));
  return build_box(l_restr, conormals, PsefCone(n, std::move(cone)));
}

inline UniformGrid grid_from_key(const ProblemFile& pf, std::string_view key, UniformGrid fallback) {
  const auto* e = pf.find(key);
  if (!e) return fallback;
  auto v = pf.reals(*e);
  if (v.size() != 3) pf.fail(*e, "expected 'lo hi n'");
  if (!(v[0] < v[1])) pf.fail(*e, "need lo < hi");
  if (v[2] != std::floor(v[2]) || v[2] < 3 || v[2] > 1e7) pf.fail(*e, "n must be an integer >= 3");
  return {v[0], v[1], static_cast<std::size_t>(v[2])};
}

/// "profile degree [amplitude]" with profile in {fubini_study, bump, flat}.
inline RadialWeight weight_from_tokens(const ProblemFile& pf, const ProblemEntry& e,
                                       const std::vector<std::string>& tok, const UniformGrid& grid,
                                       std::optional<double> amplitude) {
  const auto& profile = tok.at(0);
  if (profile == "flat") {
    if (tok.size() != 1) pf.fail(e, "profile 'flat' takes no parameters");
    if (amplitude) pf.fail(e, "profile 'flat' takes no amplitude");
    return sample_weight(Rational(0), grid, [](double) { return 0.0; }, "flat");
  }
  if (tok.size() < 2) pf.fail(e, "profile '" + profile + "' needs a degree");
  Rational k;
  try {
    k = parse_rational(tok[1]);
  } catch (const InputError& err) {
    pf.fail(e, err.what());
  }
  if (k < 0) pf.fail(e, "degree must be non-negative");
  if (profile == "fubini_study") {
    if (tok.size() != 2 || amplitude) pf.fail(e, "profile 'fubini_study' takes only a degree");
    return fubini_study(k, grid);
  }
  if (profile == "bump") {
    if (tok.size() > 3) pf.fail(e, "profile 'bump' takes a degree and an optional amplitude");
    double amp = amplitude.value_or(1.0);
    if (tok.size() == 3) {
      try {
        amp = to_double(parse_rational(tok[2]));
      } catch (const InputError&) {
        pf.fail(e, "amplitude must be an integer or p/q");
      }
    }
    if (amp < 0) pf.fail(e, "amplitude must be non-negative");
    return bump_weight(k, grid, amp);
  }
  pf.fail(e, "unknown profile '" + profile + "' (fubini_study, bump, flat)");
}

inline Json echo(const ProblemFile& pf) {
  Json o = Json::object();
  o["kind"] = kind_name(pf.kind());
  for (const auto& e : pf.entries()) {
    const auto& keys = allowed_keys(pf.kind());
    const bool repeated =
        std::any_of(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.name == e.key && k.repeatable; });
    if (repeated) {
      if (!o.contains(e.key)) o[e.key] = Json::array();
      o[e.key].push_back(e.value);
    } else {
      o[e.key] = e.value;
    }
  }
  return o;
}

}  // namespace detail

inline Json report_header(std::string_view command, const RunOptions& opt) {
  Json h;
  h["tool"] = "minsing";
  h["version"] = MINSING_VERSION;
  h["command"] = command;
  Json o;
  o["tol"] = opt.tol ? Json(*opt.tol) : Json(nullptr);
  o["seed"] = opt.seed;
  h["options"] = o;
  return h;
}

inline void finish(RunReport& rep, const detail::Checks& checks) {
  rep.record["checks"] = checks.json();
  rep.record["status"] = checks.failed() ? "tolerance_failure" : "ok";
  rep.exit_code = checks.failed() ? 1 : 0;
}

/// Degrees, nefness, Box_L, vertices, generic Lelong exponent, tropical
/// weight and its comparison with c log(e^{t1} + e^{t2}) on [-40, 0]^2.
inline RunReport run_zariski(int n, const RunOptions& opt, std::size_t samples = 4096) {
  if (n < 1) throw InputError("N must be a positive integer");
  if (samples == 0) throw InputError("samples must be positive");
  RunReport rep;
  rep.record = report_header("zariski", opt);
  rep.record["input"] = {{"n", n}, {"samples", samples}};

  const auto deg = zariski_degrees(n);
  const bool nef = is_nef_zariski(n);
  auto box = zariski_box(n);
  const auto verts = vertices_of(box);
  const auto exponent = generic_lelong(box);
  Json res;
  res["degrees"] = {{"L|_Y", to_string(deg.deg_l_restr)}, {"N_1", to_string(deg.deg_n1)}, {"N_2", to_string(deg.deg_n2)}};
  res["nef"] = nef;
  res["box"] = {{"dimension", box.dimension()}, {"halfspaces", detail::halfspaces_json(box)}};
  Json vj = Json::array();
  for (const auto& v : verts) vj.push_back(detail::rationals_json(v));
  res["vertices"] = vj;
  res["empty"] = verts.empty();
  res["contains_origin"] = contains_origin(box);
  res["bounded"] = contains_origin(box);  // locally bounded minimal weight iff 0 in Box_L
  res["generic_lelong"] = detail::optional_rational(exponent);

  detail::Checks checks;
  const Rational expected_exponent = n >= 12 ? Rational(n - 12, n - 8) : Rational(0);
  if (n >= 9) {
    checks.add_exact("generic_lelong", exponent && *exponent == expected_exponent,
                     exponent ? to_string(*exponent) : "none", to_string(expected_exponent));
    checks.add_exact("nef", nef == (n <= 12), nef ? "true" : "false", n <= 12 ? "true" : "false");
  }

  rep.tables.push_back(detail::vertex_table(verts, box.dimension()));
  if (auto tw = from_box(box)) {
    res["tropical_pieces"] = detail::tropical_json(*tw);
    const double c = to_double(*exponent);
    auto closed = [c](std::span<const double> t) {
      const double m = std::max(t[0], t[1]);
      return c * (m + std::log(std::exp(t[0] - m) + std::exp(t[1] - m)));
    };
    // Halton sampling starts after `seed` skipped points.
    LogBox region{{-40.0, -40.0}, {0.0, 0.0}};
    GapStatistics gap{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    auto visit = [&](std::span<const double> t) {
      double d = (*tw)(t) - closed(t);
      gap.sup_gap = std::max(gap.sup_gap, d);
      gap.inf_gap = std::min(gap.inf_gap, d);
    };
    for (double a : {-40.0, 0.0})
      for (double b : {-40.0, 0.0}) {
        std::vector<double> t{a, b};
        visit(t);
      }
    for (std::uint64_t i = 1; i <= samples; ++i) visit(halton_point(region, opt.seed + i));
    const double bound = (c + 1.0) * std::numbers::ln2;
    res["closed_form"] = {{"coefficient", to_string(*exponent)},
                          {"region", {{"lo", {-40.0, -40.0}}, {"hi", {0.0, 0.0}}}},
                          {"sup_gap", gap.sup_gap},
                          {"inf_gap", gap.inf_gap},
                          {"spread", gap.spread()},
                          {"bound", bound}};
    checks.add("closed_form_spread", gap.spread() <= bound, gap.spread(), bound);

    Table trace{"trace", {"t_1", "t_2", "value", "achieving_alpha"}, {}};
    for (int i = 0; i <= 8; ++i)
      for (int j = 0; j <= 8; ++j) {
        std::vector<double> t{-40.0 + 5.0 * i, -40.0 + 5.0 * j};
        auto tr = tw->evaluate_traced(t);
        trace.rows.push_back({format_double(t[0]), format_double(t[1]), format_double(tr.value),
                              detail::alpha_cell(tw->pieces()[tr.piece].alpha)});
      }
    rep.tables.push_back(std::move(trace));
  }
  rep.record["result"] = res;
  finish(rep, checks);
  return rep;
}

inline RunReport run_box(const ProblemFile& pf, const RunOptions& opt) {
  RunReport rep;
  rep.record = report_header("box", opt);
  auto box = detail::box_from_keys(pf);
  const auto r = box.dimension();
  std::vector<RationalVector> directions;
  for (const auto* e : pf.all("direction")) {
    auto d = pf.rationals(*e);
    if (d.size() != r) pf.fail(*e, "direction needs r = " + std::to_string(r) + " entries");
    for (const auto& x : d)
      if (x <= 0) pf.fail(*e, "direction entries must be positive");
    directions.push_back(std::move(d));
  }

  const auto verts = vertices_of(box);
  Json res;
  res["dimension"] = r;
  res["halfspaces"] = detail::halfspaces_json(box);
  Json vj = Json::array();
  for (const auto& v : verts) vj.push_back(detail::rationals_json(v));
  res["vertices"] = vj;
  res["empty"] = verts.empty();
  res["contains_origin"] = contains_origin(box);
  res["generic_lelong"] = detail::optional_rational(generic_lelong(box));
  Json dj = Json::array();
  for (const auto& d : directions)
    dj.push_back({{"direction", detail::rationals_json(d)},
                  {"coefficient", detail::optional_rational(directional_coefficient(box, d))}});
  res["directional"] = dj;
  if (auto tw = from_box(box)) res["tropical_pieces"] = detail::tropical_json(*tw);
  rep.record["result"] = res;
  rep.tables.push_back(detail::vertex_table(verts, r));
  finish(rep, {});
  return rep;
}

inline RunReport run_integral(const ProblemFile& pf, const RunOptions& opt) {
  RunReport rep;
  rep.record = report_header("integral", opt);
  const double tol = opt.tol.value_or(1e-6);
  if (!(tol > 0)) throw InputError("--tol must be positive");

  const auto& re = pf.require("r");
  const auto r = pf.integer(re);
  if (r < 1 || r > 8) pf.fail(re, "r must be between 1 and 8");
  const auto& te = pf.require("t");
  auto t = pf.reals(te);
  if (t.size() != static_cast<std::size_t>(r)) pf.fail(te, "needs r = " + std::to_string(r) + " entries");
  for (double x : t)
    if (!(x > -1.0)) pf.fail(te, "every t_l must exceed -1");
  if (!(detail::sum_of(t) < 2.0)) pf.fail(te, "sum of t must be below 2");
  const auto& pe = pf.require("phi");
  auto phi = pf.reals(pe);
  if (phi.size() != static_cast<std::size_t>(r + 1)) pf.fail(pe, "needs r+1 = " + std::to_string(r + 1) + " entries");

  QuadratureSpec q;
  if (auto* e = pf.find("rel_tol")) q.rel_tol = pf.positive(*e);
  if (auto* e = pf.find("sigma_max")) q.sigma_max = pf.positive(*e);
  if (auto* e = pf.find("panels")) {
    auto p = pf.integer(*e);
    if (p < 1 || p > 10000000) pf.fail(*e, "panels must be a positive integer");
    q.panels = static_cast<int>(p);
  }
  long long extra = 0;
  if (auto* e = pf.find("random_samples")) {
    extra = pf.integer(*e);
    if (extra < 0 || extra > 100000) pf.fail(*e, "must be between 0 and 100000");
  }

  std::vector<FiberProblem> problems{{static_cast<int>(r), t, phi}};
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> uphi(-1.0, 1.0);
  for (long long i = 0; i < extra; ++i) {
    FiberProblem p{static_cast<int>(r), sample_window(static_cast<int>(r), rng), {}};
    for (int l = 0; l <= r; ++l) p.phi.push_back(uphi(rng));
    problems.push_back(std::move(p));
  }

  Table table{"integral", {"r"}, {}};
  for (int l = 1; l <= r; ++l) table.header.push_back("t_" + std::to_string(l));
  for (int l = 1; l <= r + 1; ++l) table.header.push_back("phi_" + std::to_string(l));
  for (const char* h : {"closed_form", "numeric", "rel_err", "panels_used"}) table.header.push_back(h);

  detail::Checks checks;
  double worst = 0.0;
  Json rows = Json::array();
  for (const auto& p : problems) {
    const double closed = closed_form(p);
    const auto num = numeric_integral(p, q);
    const double rel = std::abs(num.value - closed) / closed;
    worst = std::max(worst, rel);
    std::vector<std::string> row{std::to_string(r)};
    for (double x : p.t) row.push_back(format_double(x));
    for (double x : p.phi) row.push_back(format_double(x));
    for (double x : {closed, num.value, rel}) row.push_back(format_double(x));
    row.push_back(std::to_string(num.panels_used));
    table.rows.push_back(std::move(row));
    rows.push_back({{"t", detail::reals_json(p.t)},
                    {"phi", detail::reals_json(p.phi)},
                    {"closed_form", closed},
                    {"numeric", num.value},
                    {"rel_err", rel},
                    {"quadrature_rel_error", num.rel_error},
                    {"panels_used", num.panels_used},
                    {"tail_bound", num.tail_bound}});
  }
  checks.add("max_rel_err", worst < tol, worst, tol);

  const auto norm = normalization_constant(static_cast<int>(r), phi, q);
  double expected = 1.0;
  for (int l = 1; l <= r; ++l) expected *= 2.0 * std::numbers::pi / l;
  const double norm_rel = std::abs(norm.value - expected) / expected;
  checks.add("normalization_rel_err", norm_rel < tol, norm_rel, tol);

  Json res;
  res["rows"] = rows;
  res["max_rel_err"] = worst;
  res["normalization"] = {{"numeric", norm.value}, {"expected", expected}, {"rel_err", norm_rel}};
  rep.record["result"] = res;
  rep.tables.push_back(std::move(table));
  finish(rep, checks);
  return rep;
}

inline RunReport run_envelope(const ProblemFile& pf, const RunOptions& opt) {
  RunReport rep;
  rep.record = report_header("envelope", opt);
  const double tol = opt.tol.value_or(1e-6);
  if (!(tol > 0)) throw InputError("--tol must be positive");

  const auto grid = detail::grid_from_key(pf, "grid", UniformGrid{});
  const auto& pe = pf.require("profile");
  const auto& de = pf.require("degree");
  std::vector<std::string> tok{pf.tokens(pe).at(0)};
  if (pf.tokens(pe).size() != 1) pf.fail(pe, "expected a single profile name");
  if (tok[0] == "flat") pf.fail(pe, "use profile 'fubini_study' with degree 0 for the trivial bundle");
  tok.push_back(pf.tokens(de).at(0));
  if (pf.tokens(de).size() != 1) pf.fail(de, "expected a single value");
  std::optional<double> amplitude;
  if (auto* e = pf.find("amplitude")) {
    if (tok[0] != "bump") pf.fail(*e, "only the bump profile takes an amplitude");
    amplitude = pf.real(*e);
    if (*amplitude < 0) pf.fail(*e, "must be non-negative");
  }
  auto w = detail::weight_from_tokens(pf, pe, tok, grid, amplitude);
  if (auto* e = pf.find("shift")) w = w.shifted(pf.real(*e));

  const auto& me = pf.require("m_list");
  std::vector<int> m_list;
  for (auto m : pf.integers(me)) {
    if (m < 1 || m > 10000) pf.fail(me, "each m must be a positive integer");
    if (denominator(Rational(m) * w.degree) != 1)
      pf.fail(me, "m*k = " + to_string(Rational(m) * w.degree) + " is not an integer");
    m_list.push_back(static_cast<int>(m));
  }

  const auto rep_s = sandwich_report(w, m_list);
  const auto& v = rep_s.envelope.v.values;
  double v_max = -std::numeric_limits<double>::infinity(), v_min = std::numeric_limits<double>::infinity();
  std::size_t contact = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    v_max = std::max(v_max, v[i]);
    v_min = std::min(v_min, v[i]);
    contact += rep_s.envelope.contact[i] ? 1 : 0;
  }
  auto again = equilibrium_envelope(RadialWeight{w.degree, grid, [&] {
                                                   std::vector<double> s(v.size());
                                                   for (std::size_t i = 0; i < s.size(); ++i) s[i] = w.values[i] + v[i];
                                                   return s;
                                                 }(),
                                                 "phi+V"});
  double idem = 0.0;
  for (double x : again.v.values) idem = std::max(idem, std::abs(x));

  detail::Checks checks;
  checks.add("envelope_nonpositive", v_max <= tol, v_max, tol);
  checks.add("idempotence", idem <= tol, idem, tol);
  Json rows = Json::array();
  for (std::size_t k = 0; k < rep_s.rows.size(); ++k) {
    const auto& row = rep_s.rows[k];
    rows.push_back({{"m", row.m},
                    {"sup_v_theta_minus_v_b", row.lower_violation},
                    {"sup_v_b_minus_v_theta", row.gap},
                    {"log_norms", detail::reals_json(rep_s.bergman[k].log_norms)}});
    checks.add("lower_sandwich_m" + std::to_string(row.m), row.lower_violation <= tol, row.lower_violation, tol);
    checks.add("gap_finite_m" + std::to_string(row.m), std::isfinite(row.gap), row.gap,
               std::numeric_limits<double>::infinity());
  }
  checks.add("gap_nonincreasing", rep_s.gap_nonincreasing, rep_s.gap_nonincreasing ? 1.0 : 0.0, 1.0);

  Json res;
  res["weight"] = {{"label", w.label}, {"degree", to_string(w.degree)}, {"admissible", w.admissible()}};
  res["grid"] = {{"lo", grid.lo}, {"hi", grid.hi}, {"n", grid.n}};
  res["envelope"] = {{"max", v_max}, {"min", v_min}, {"contact_points", contact}, {"idempotence_residual", idem}};
  res["sandwich"] = rows;
  res["proxy_violation"] = rep_s.proxy_violation;
  res["gap_nonincreasing"] = rep_s.gap_nonincreasing;
  rep.record["result"] = res;

  Table table{"envelope", {"t", "phi", "V_theta"}, {}};
  for (int m : m_list) table.header.push_back("v_b_m" + std::to_string(m));
  for (std::size_t i = 0; i < grid.n; ++i) {
    std::vector<std::string> row{format_double(grid.at(i)), format_double(w.values[i]), format_double(v[i])};
    for (const auto& b : rep_s.bergman) row.push_back(format_double(b.v_b.values[i]));
    table.rows.push_back(std::move(row));
  }
  rep.tables.push_back(std::move(table));
  finish(rep, checks);
  return rep;
}

inline RunReport run_vhat(const ProblemFile& pf, const RunOptions& opt) {
  RunReport rep;
  rep.record = report_header("vhat", opt);
  const double tol = opt.tol.value_or(1e-6);
  if (!(tol > 0)) throw InputError("--tol must be positive");

  const bool explicit_box = pf.has("rank") || pf.has("l_restr") || pf.has("conormal") || pf.has("cone");
  std::optional<BoxPolytope> box;
  if (auto* e = pf.find("zariski_n")) {
    if (explicit_box) pf.fail(*e, "give either zariski_n or rank/cone/l_restr/conormal, not both");
    auto n = pf.integer(*e);
    if (n < 1 || n > 1000000) pf.fail(*e, "must be a positive integer");
    box = zariski_box(static_cast<int>(n));
  } else if (explicit_box) {
    box = detail::box_from_keys(pf);
  } else {
    pf.fail("missing Box_L: give zariski_n or rank/cone/l_restr/conormal");
  }
  const auto r = box->dimension();

  const auto base_grid = detail::grid_from_key(pf, "base_grid", UniformGrid{-10.0, 10.0, 101});
  const auto fiber_grid = detail::grid_from_key(pf, "fiber_grid", UniformGrid{-10.0, 0.0, 21});
  const auto& de = pf.require("density");
  const auto density = pf.integer(de);
  if (density < 1 || density > 256) pf.fail(de, "must be an integer between 1 and 256");

  const auto base_entries = pf.all("base");
  if (base_entries.size() != r + 1)
    pf.fail(*base_entries.back(), "need r+1 = " + std::to_string(r + 1) + " base lines, got " +
                                      std::to_string(base_entries.size()));
  std::vector<RadialWeight> weights;
  double k_max = 0.0;
  for (const auto* e : base_entries) {
    weights.push_back(detail::weight_from_tokens(pf, *e, pf.tokens(*e), base_grid, std::nullopt));
    k_max = std::max(k_max, weights.back().degree_value());
  }
  if (is_empty(*box)) throw InputError("Box_L is empty (infeasible)");

  std::vector<UniformGrid> fiber_axes(r, fiber_grid);
  const auto coarse = vhat_toy(weights, *box, static_cast<int>(density), fiber_axes);
  const auto fine = vhat_toy(weights, *box, static_cast<int>(2 * density), fiber_axes);
  double increment = 0.0, decrease = 0.0;
  for (std::size_t i = 0; i < fine.weight.values.size(); ++i) {
    double d = fine.weight.values[i] - coarse.weight.values[i];
    increment = std::max(increment, d);
    decrease = std::max(decrease, -d);
  }
  std::vector<double> budget(r, 1.0);
  budget.push_back(k_max);
  const auto psh = psh_convexity_check(coarse.weight, budget, tol);

  detail::Checks checks;
  checks.add("psh_worst_violation", psh.passed, psh.worst_violation, tol);
  checks.add("refinement_nondecreasing", decrease <= tol, decrease, tol);

  Json res;
  res["dimension"] = r;
  Json vj = Json::array();
  for (const auto& v : vertices_of(*box)) vj.push_back(detail::rationals_json(v));
  res["box_vertices"] = vj;
  Json aj = Json::array();
  for (const auto& a : coarse.alphas) aj.push_back(detail::rationals_json(a));
  res["alpha_grid"] = aj;
  res["density"] = density;
  res["base_grid"] = {{"lo", base_grid.lo}, {"hi", base_grid.hi}, {"n", base_grid.n}};
  res["fiber_grid"] = {{"lo", fiber_grid.lo}, {"hi", fiber_grid.hi}, {"n", fiber_grid.n}};
  res["slope_budget"] = detail::reals_json(budget);
  res["psh"] = {{"passed", psh.passed}, {"worst_violation", psh.worst_violation}};
  res["refinement"] = {{"next_density", 2 * density}, {"max_increment", increment}, {"max_decrease", decrease}};
  rep.record["result"] = res;

  Table table{"vhat", {}, {}};
  for (std::size_t l = 1; l <= r; ++l) table.header.push_back("t_fiber_" + std::to_string(l));
  table.header.push_back("t_base");
  table.header.push_back("W");
  table.header.push_back("achieving_alpha");
  for (std::size_t i = 0; i < coarse.weight.values.size(); ++i) {
    std::vector<std::string> row;
    for (double x : coarse.weight.point(i)) row.push_back(format_double(x));
    row.push_back(format_double(coarse.weight.values[i]));
    row.push_back(detail::alpha_cell(coarse.alphas[coarse.argmax[i]]));
    table.rows.push_back(std::move(row));
  }
  rep.tables.push_back(std::move(table));
  finish(rep, checks);
  return rep;
}

/// Dispatches on the problem kind and embeds the input echo and hash.
inline RunReport run(const ProblemFile& pf, const RunOptions& opt) {
  RunReport rep;
  switch (pf.kind()) {
    case ProblemKind::box: rep = run_box(pf, opt); break;
    case ProblemKind::zariski: {
      const auto& ne = pf.require("n");
      auto n = pf.integer(ne);
      if (n < 1 || n > 1000000) pf.fail(ne, "must be a positive integer");
      std::size_t samples = 4096;
      if (auto* e = pf.find("samples")) {
        auto s = pf.integer(*e);
        if (s < 1 || s > 10000000) pf.fail(*e, "must be a positive integer");
        samples = static_cast<std::size_t>(s);
      }
      rep = run_zariski(static_cast<int>(n), opt, samples);
      break;
    }
    case ProblemKind::integral: rep = run_integral(pf, opt); break;
    case ProblemKind::envelope: rep = run_envelope(pf, opt); break;
    case ProblemKind::vhat: rep = run_vhat(pf, opt); break;
  }
  Json input;
  input["origin"] = pf.origin();
  input["hash"] = "fnv1a64:" + hex64(fnv1a(pf.canonical_text()));
  input["echo"] = detail::echo(pf);
  auto result = rep.record["result"];
  auto checks = rep.record["checks"];
  auto status = rep.record["status"];
  rep.record.erase("result");
  rep.record.erase("checks");
  rep.record.erase("status");
  rep.record["input"] = input;
  rep.record["result"] = result;
  rep.record["checks"] = checks;
  rep.record["status"] = status;
  return rep;
}

/// Record for a run that failed with an exception.
inline RunReport error_report(std::string_view command, const RunOptions& opt, const std::string& message) {
  RunReport rep;
  rep.record = report_header(command, opt);
  rep.record["status"] = "error";
  rep.record["error"] = message;
  rep.exit_code = 2;
  return rep;
}

namespace detail {

inline void write_atomically(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

/// report.json, one CSV per table, and timing.json (wall time only).
inline void write_outputs(const RunReport& rep, const std::filesystem::path& dir, double wall_seconds) {
  std::filesystem::create_directories(dir);
  for (const auto& t : rep.tables) detail::write_atomically(dir / (t.name + ".csv"), t.csv());
  detail::write_atomically(dir / "report.json", rep.record.dump(2) + "\n");
  Json timing;
  timing["wall_seconds"] = wall_seconds;
  detail::write_atomically(dir / "timing.json", timing.dump(2) + "\n");
}

}  // namespace minsing
