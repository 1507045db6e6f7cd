// Acceptance suite: one PASS/FAIL line per criterion.
// usage: acceptance <minsing-cli> <problems-dir> <work-dir>

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "envelope_oracle.hpp"
#include "minsing/minsing.hpp"

namespace fs = std::filesystem;
using namespace minsing;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string cli, problems_dir;
fs::path work;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args, const fs::path& out) {
  std::string cmd = "\"" + cli + "\" " + args + " --out \"" + out.string() + "\" > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

nlohmann::json report_of(const fs::path& out) { return nlohmann::json::parse(slurp(out / "report.json")); }

double log_sum(double a, double b) {
  double m = std::max(a, b);
  return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double moment_oracle(int r, const std::vector<double>& t, const std::vector<double>& phi, double p) {
  double s = 0.0, lg = r * std::log(2 * std::numbers::pi), la = 0.0;
  for (int l = 0; l < r; ++l) {
    s += t[l];
    lg += std::lgamma(1 + t[l]);
    la -= t[l] * phi[l];
  }
  lg += std::lgamma(1 + p - s) - std::lgamma(r + 1 + p);
  la += (s - p) * phi[r];
  return std::exp(lg + la);
}

Outcome zariski_pipeline() {
  for (int n = 13; n <= 20; ++n) {
    auto out = work / ("zariski_" + std::to_string(n));
    auto t0 = std::chrono::steady_clock::now();
    int rc = run_cli("zariski --n " + std::to_string(n), out);
    double dt = seconds_since(t0);
    if (rc != 0) return {false, "N=" + std::to_string(n) + " exit " + std::to_string(rc)};
    if (dt >= 1.0) return {false, "N=" + std::to_string(n) + " took " + std::to_string(dt) + " s"};
    auto res = report_of(out)["result"];
    const std::string c = to_string(Rational(n - 12, n - 8));
    auto expected = nlohmann::json::array({{"0", c}, {"0", "1"}, {c, "0"}, {"1", "0"}});
    auto got = res["vertices"];
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    if (res["generic_lelong"] != c) return {false, "N=" + std::to_string(n) + " exponent " + res["generic_lelong"].dump()};
    if (res["nef"] != false) return {false, "N=" + std::to_string(n) + " reported nef"};
    if (got != expected) return {false, "N=" + std::to_string(n) + " vertices " + got.dump()};
  }
  return {true, "N=13..20 exact, each run < 1 s"};
}

Outcome nef_threshold() {
  auto out = work / "zariski_12";
  if (int rc = run_cli("zariski --n 12", out); rc != 0) return {false, "exit " + std::to_string(rc)};
  auto res = report_of(out)["result"];
  bool ok = res["nef"] == true && res["contains_origin"] == true && res["generic_lelong"] == "0";
  return {ok, "nef=" + res["nef"].dump() + " contains_origin=" + res["contains_origin"].dump() +
                  " exponent=" + res["generic_lelong"].dump()};
}

Outcome fiber_closed_form() {
  auto t0 = std::chrono::steady_clock::now();
  QuadratureSpec q;
  double worst = 0.0;
  std::mt19937_64 rng(3105);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int r = 1; r <= 3; ++r)
    for (int i = 0; i < 20; ++i) {
      FiberProblem p{r, sample_window(r, rng), {}};
      for (int l = 0; l <= r; ++l) p.phi.push_back(u(rng));
      double closed = closed_form(p);
      double oracle = moment_oracle(r, p.t, p.phi, 1.0);
      worst = std::max({worst, std::abs(numeric_integral(p, q).value - closed) / closed,
                        std::abs(closed - oracle) / oracle});
    }
  double a1 = numeric_integral({1, {0.0}, {0, 0}}, q).value;
  double a2 = numeric_integral({2, {0.5, 0.5}, {0, 0, 0}}, q).value;
  double anchor = std::max(std::abs(a1 - std::numbers::pi) / std::numbers::pi,
                           std::abs(a2 - std::pow(std::numbers::pi, 3) / 6) / (std::pow(std::numbers::pi, 3) / 6));
  double dt = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "max rel err %.3g over 60 samples, anchors %.3g, %.2f s", worst, anchor, dt);
  return {worst < 1e-6 && anchor < 1e-6 && dt < 60.0, buf};
}

Outcome normalization() {
  QuadratureSpec q;
  std::mt19937_64 rng(44);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int r = 1; r <= 2; ++r) {
    std::vector<double> values;
    for (int i = 0; i < 10; ++i) {
      std::vector<double> phi(r + 1);
      for (auto& x : phi) x = u(rng);
      values.push_back(normalization_constant(r, phi, q).value);
    }
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    worst = std::max(worst, (*hi - *lo) / *lo);
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max relative spread across phi %.3g", worst);
  return {worst <= 1e-8, buf};
}

Outcome orthogonality() {
  QuadratureSpec q;
  double worst = 0.0;
  int pairs = 0;
  std::vector<double> phi1{0.3, -0.7}, phi2{-0.2, 0.5, 0.1};
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 4; ++b)
      if (a != b) {
        worst = std::max(worst, orthogonality_check(1, {a}, {b}, phi1, q));
        ++pairs;
      }
  for (int a = 0; a < 25; ++a)
    for (int b = 0; b < 25; ++b)
      if (a != b) {
        worst = std::max(worst, orthogonality_check(2, {a / 5, a % 5}, {b / 5, b % 5}, phi2, q));
        ++pairs;
      }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d pairs, max normalized inner product %.3g", pairs, worst);
  return {worst <= 1e-10, buf};
}

Outcome holder() {
  QuadratureSpec q;
  int cases = 0;
  double worst = -1e300;
  for (const auto& phi : std::vector<std::vector<double>>{{0.0, 0.0}, {0.4, -0.9}, {0.0, 0.0, 0.0}, {0.3, -0.5, 0.8}}) {
    const int r = static_cast<int>(phi.size()) - 1;
    for (int m = 1; m <= 4; ++m)
      for (int a = 0; a <= m; ++a)
        for (int b = 0; b <= (r == 2 ? m - a : 0); ++b) {
          std::vector<int> ell = r == 1 ? std::vector<int>{a} : std::vector<int>{a, b};
          auto s = holder_check(r, m, ell, phi, q);
          worst = std::max(worst, s.lhs / s.rhs - 1.0);
          ++cases;
        }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d cases, max lhs/rhs - 1 = %.3g", cases, worst);
  return {worst <= 1e-8, buf};
}

Outcome envelope() {
  auto fs_env = equilibrium_envelope(fubini_study(1, UniformGrid{-40, 40, 4096}));
  double fs_max = 0.0;
  for (double v : fs_env.v.values) fs_max = std::max(fs_max, std::abs(v));

  UniformGrid g{-40, 40, 10000};
  auto bump = bump_weight(2, g);
  auto env = equilibrium_envelope(bump);
  std::vector<double> sum(g.n), ts(g.n);
  for (std::size_t i = 0; i < g.n; ++i) {
    sum[i] = bump.values[i] + env.v.values[i];
    ts[i] = g.at(i);
  }
  auto again = equilibrium_envelope(RadialWeight{bump.degree, g, sum, "phi+V"});
  double idem = 0.0;
  for (double v : again.v.values) idem = std::max(idem, std::abs(v));
  double oracle_err = 0.0;
  for (std::size_t i = 0; i < g.n; i += 5) {
    double expected = std::min(0.0, oracle::restricted_biconjugate(ts, bump.values, 2.0, ts[i]) - bump.values[i]);
    oracle_err = std::max(oracle_err, std::abs(env.v.values[i] - expected));
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "FS max|V| %.3g, idempotence %.3g, bump vs oracle %.3g", fs_max, idem, oracle_err);
  return {fs_max <= 1e-9 && idem <= 2e-9 && oracle_err <= 1e-6, buf};
}

Outcome sandwich() {
  std::string detail;
  bool ok = true;
  for (const auto& w : {fubini_study(1, UniformGrid{}), bump_weight(2, UniformGrid{})}) {
    auto rep = sandwich_report(w, {1, 2, 4, 8});
    double lower = -1e300;
    std::string gaps;
    for (const auto& row : rep.rows) {
      lower = std::max(lower, row.lower_violation);
      ok = ok && std::isfinite(row.gap);
      char b[32];
      std::snprintf(b, sizeof b, "%s%.3g", gaps.empty() ? "" : ",", row.gap);
      gaps += b;
    }
    ok = ok && lower <= 1e-6 && rep.gap_nonincreasing;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s%s: sup(V-v_b) %.3g, gaps [%s]", detail.empty() ? "" : "; ", w.label.c_str(),
                  lower, gaps.c_str());
    detail += buf;
  }
  return {ok, detail};
}

Outcome alpha_monotonicity() {
  UniformGrid g{-20, 20, 801};
  std::vector<RadialWeight> ws{fubini_study(1, g), fubini_study(2, g), bump_weight(2, g)};
  std::mt19937 rng(77);
  std::uniform_int_distribution<int> num(0, 30);
  double worst = 0.0;
  int pairs = 0;
  while (pairs < 50) {
    RationalVector a{Rational(num(rng), 64), Rational(num(rng), 64)};
    RationalVector b{a[0] + Rational(num(rng), 128), a[1] + Rational(num(rng), 128)};
    if (b[0] + b[1] >= 1) continue;
    worst = std::max(worst, monotonicity_check(ws, a, b).max_violation);
    ++pairs;
  }
  auto gaps = limit_gaps(ws, {Rational(1, 5), Rational(1, 10)}, {Rational(1, 10), Rational(1, 100), Rational(1, 1000)});
  bool trend = gaps[0] > gaps[1] && gaps[1] > gaps[2];
  char buf[160];
  std::snprintf(buf, sizeof buf, "50 pairs max violation %.3g; limit gaps %.3g, %.3g, %.3g", worst, gaps[0], gaps[1],
                gaps[2]);
  return {worst <= 1e-7 && trend, buf};
}

Outcome vhat_structure() {
  UniformGrid base{-10, 10, 101}, fiber{-10, 0, 21};
  auto box = zariski_box(16);
  std::vector<RadialWeight> flat(3, sample_weight(0, base, [](double) { return 0.0; }, "flat"));
  auto toy = vhat_toy(flat, box, 4, {fiber, fiber});
  auto tw = *from_box(box);
  double cross = 0.0;
  for (std::size_t i = 0; i < toy.weight.values.size(); ++i) {
    auto p = toy.weight.point(i);
    std::vector<double> t{p[0], p[1]};
    cross = std::max(cross, std::abs(toy.weight.values[i] - tw(t)));
  }
  std::vector<RadialWeight> ample{fubini_study(1, base), fubini_study(2, base), bump_weight(2, base)};
  std::vector<double> prev, inc;
  double psh = 0.0;
  for (int d : {2, 4, 8, 16}) {
    auto res = vhat_toy(ample, box, d, {fiber, fiber});
    psh = std::max(psh, psh_convexity_check(res.weight, {1.0, 1.0, 2.0}).worst_violation);
    if (!prev.empty()) {
      double m = 0.0;
      for (std::size_t i = 0; i < prev.size(); ++i) m = std::max(m, res.weight.values[i] - prev[i]);
      inc.push_back(m);
    }
    prev = res.weight.values;
  }
  bool shrinking = inc[0] > inc[1] && inc[1] > inc[2];
  char buf[200];
  std::snprintf(buf, sizeof buf, "flat vs tropical %.3g, psh worst %.3g, increments %.3g, %.3g, %.3g", cross, psh,
                inc[0], inc[1], inc[2]);
  return {cross <= 1e-6 && psh <= 1e-6 && shrinking, buf};
}

Outcome equivalence_tester() {
  LogBox region{{-40.0, -40.0}, {0.0, 0.0}};
  double worst_ratio = 0.0;
  for (int n = 13; n <= 20; ++n) {
    auto box = zariski_box(n);
    auto w = *from_box(box);
    const double c = double(n - 12) / double(n - 8);
    auto closed = [c](std::span<const double> t) { return c * log_sum(t[0], t[1]); };
    auto g = bounded_difference(w, closed, region, 4096);
    worst_ratio = std::max(worst_ratio, g.spread() / ((c + 1) * std::numbers::ln2));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max spread / bound = %.4f", worst_ratio);
  return {worst_ratio <= 1.0, buf};
}

Outcome determinism() {
  std::vector<std::string> runs{"zariski --n 16", "zariski --n 12"};
  for (const auto& entry : fs::directory_iterator(problems_dir)) {
    auto name = entry.path().filename().string();
    auto kind = name.substr(0, name.find('_'));
    runs.push_back(kind + " \"" + entry.path().string() + "\"");
  }
  std::sort(runs.begin(), runs.end());
  int idx = 0, files = 0;
  for (const auto& args : runs) {
    auto a = work / ("det_" + std::to_string(idx) + "_a"), b = work / ("det_" + std::to_string(idx) + "_b");
    ++idx;
    int ra = run_cli(args, a), rb = run_cli(args, b);
    if (ra != rb) return {false, args + ": exit codes differ"};
    for (const auto& f : fs::directory_iterator(a)) {
      auto fname = f.path().filename();
      if (fname == "timing.json") continue;
      if (slurp(f.path()) != slurp(b / fname)) return {false, args + ": " + fname.string() + " differs"};
      ++files;
    }
  }
  return {true, std::to_string(runs.size()) + " commands, " + std::to_string(files) + " files identical"};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 4) {
    std::fprintf(stderr, "usage: acceptance <minsing-cli> <problems-dir> <work-dir>\n");
    return 2;
  }
  cli = argv[1];
  problems_dir = argv[2];
  work = argv[3];
  fs::remove_all(work);
  fs::create_directories(work);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"zariski pipeline N=13..20", zariski_pipeline},
      {"nef threshold N=12", nef_threshold},
      {"fiber integral closed form", fiber_closed_form},
      {"normalization independent of phi", normalization},
      {"monomial orthogonality", orthogonality},
      {"holder inequality", holder},
      {"envelope correctness", envelope},
      {"bergman sandwich", sandwich},
      {"alpha monotonicity and limit", alpha_monotonicity},
      {"vhat structure", vhat_structure},
      {"O(1)-equivalence tester", equivalence_tester},
      {"report determinism", determinism},
  };
  int failed = 0, k = 0;
  for (const auto& [name, fn] : criteria) {
    ++k;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", k, name, o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%d criteria passed\n", k - failed, k);
  return failed == 0 ? 0 : 1;
}
