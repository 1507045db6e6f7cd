#pragma once

// Problem files: one `key = value` per line, `#` starts a comment, blank
// lines ignored. The first key must be `kind`. List-valued keys take
// whitespace-separated tokens; keys marked repeatable may appear on several
// lines (one list per line). See README for the per-kind key tables.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "minsing/errors.hpp"
#include "minsing/rational.hpp"

namespace minsing {

class ProblemError : public InputError {
 public:
  ProblemError(const std::string& origin, int line, const std::string& msg)
      : InputError(line > 0 ? origin + ":" + std::to_string(line) + ": " + msg : origin + ": " + msg) {}
};

enum class ProblemKind { box, zariski, integral, envelope, vhat };

inline std::string_view kind_name(ProblemKind k) {
  switch (k) {
    case ProblemKind::box: return "box";
    case ProblemKind::zariski: return "zariski";
    case ProblemKind::integral: return "integral";
    case ProblemKind::envelope: return "envelope";
    case ProblemKind::vhat: return "vhat";
  }
  return "?";
}

inline std::optional<ProblemKind> parse_kind(std::string_view s) {
  for (auto k : {ProblemKind::box, ProblemKind::zariski, ProblemKind::integral, ProblemKind::envelope,
                 ProblemKind::vhat})
    if (kind_name(k) == s) return k;
  return std::nullopt;
}

struct KeySpec {
  std::string_view name;
  bool repeatable = false;
  bool required = false;
};

inline const std::vector<KeySpec>& allowed_keys(ProblemKind k) {
  static const std::vector<KeySpec> box = {
      {"rank", false, true}, {"cone", true, false}, {"l_restr", false, true},
      {"conormal", true, true}, {"direction", true, false}};
  static const std::vector<KeySpec> zariski = {{"n", false, true}, {"samples", false, false}};
  static const std::vector<KeySpec> integral = {
      {"r", false, true},         {"t", false, true},          {"phi", false, true},
      {"rel_tol", false, false},  {"sigma_max", false, false}, {"panels", false, false},
      {"random_samples", false, false}};
  static const std::vector<KeySpec> envelope = {
      {"profile", false, true}, {"degree", false, true}, {"amplitude", false, false},
      {"shift", false, false},  {"grid", false, false},  {"m_list", false, true}};
  static const std::vector<KeySpec> vhat = {
      {"zariski_n", false, false}, {"rank", false, false},      {"cone", true, false},
      {"l_restr", false, false},   {"conormal", true, false},   {"base", true, true},
      {"base_grid", false, false}, {"fiber_grid", false, false}, {"density", false, true}};
  switch (k) {
    case ProblemKind::box: return box;
    case ProblemKind::zariski: return zariski;
    case ProblemKind::integral: return integral;
    case ProblemKind::envelope: return envelope;
    case ProblemKind::vhat: return vhat;
  }
  return box;
}

struct ProblemEntry {
  std::string key;
  std::string value;
  int line = 0;
};

class ProblemFile {
 public:
  ProblemFile(ProblemKind kind, std::string origin, std::vector<ProblemEntry> entries, std::string text)
      : kind_(kind), origin_(std::move(origin)), entries_(std::move(entries)), text_(std::move(text)) {}

  ProblemKind kind() const { return kind_; }
  const std::string& origin() const { return origin_; }
  const std::vector<ProblemEntry>& entries() const { return entries_; }
  /// Canonical text: entries in file order as `key = value` lines.
  const std::string& canonical_text() const { return text_; }

  bool has(std::string_view key) const { return find(key) != nullptr; }

  const ProblemEntry* find(std::string_view key) const {
    for (const auto& e : entries_)
      if (e.key == key) return &e;
    return nullptr;
  }

  std::vector<const ProblemEntry*> all(std::string_view key) const {
    std::vector<const ProblemEntry*> out;
    for (const auto& e : entries_)
      if (e.key == key) out.push_back(&e);
    return out;
  }

  const ProblemEntry& require(std::string_view key) const {
    if (auto* e = find(key)) return *e;
    throw ProblemError(origin_, 0, "missing required key '" + std::string(key) + "'");
  }

  [[noreturn]] void fail(const ProblemEntry& e, const std::string& msg) const {
    throw ProblemError(origin_, e.line, "key '" + e.key + "': " + msg);
  }
  [[noreturn]] void fail(const std::string& msg) const { throw ProblemError(origin_, 0, msg); }

  std::vector<std::string> tokens(const ProblemEntry& e) const {
    std::istringstream in(e.value);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    if (out.empty()) fail(e, "empty value");
    return out;
  }

  Rational rational(const ProblemEntry& e) const {
    auto v = rationals(e);
    if (v.size() != 1) fail(e, "expected a single value");
    return v.front();
  }

  RationalVector rationals(const ProblemEntry& e) const {
    RationalVector out;
    for (const auto& tok : tokens(e)) {
      try {
        out.push_back(parse_rational(tok));
      } catch (const InputError& err) {
        fail(e, err.what());
      }
    }
    return out;
  }

  long long integer(const ProblemEntry& e) const {
    auto q = rational(e);
    if (denominator(q) != 1) fail(e, "expected an integer, got " + to_string(q));
    if (abs(q) > Rational(1000000000)) fail(e, "integer out of range");
    return numerator(q).convert_to<long long>();
  }

  std::vector<long long> integers(const ProblemEntry& e) const {
    std::vector<long long> out;
    for (const auto& q : rationals(e)) {
      if (denominator(q) != 1) fail(e, "expected integers, got " + to_string(q));
      if (abs(q) > Rational(1000000000)) fail(e, "integer out of range");
      out.push_back(numerator(q).convert_to<long long>());
    }
    return out;
  }

  double real(const ProblemEntry& e) const {
    auto v = reals(e);
    if (v.size() != 1) fail(e, "expected a single value");
    return v.front();
  }

  /// Decimal or p/q tokens.
  std::vector<double> reals(const ProblemEntry& e) const {
    std::vector<double> out;
    for (const auto& tok : tokens(e)) {
      if (tok.find('/') != std::string::npos) {
        try {
          out.push_back(to_double(parse_rational(tok)));
        } catch (const InputError& err) {
          fail(e, err.what());
        }
        continue;
      }
      double x = 0.0;
      auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
      if (ec != std::errc() || p != tok.data() + tok.size() || !std::isfinite(x))
        fail(e, "'" + tok + "' is not a finite number");
      out.push_back(x);
    }
    return out;
  }

  double positive(const ProblemEntry& e) const {
    double x = real(e);
    if (!(x > 0)) fail(e, "must be positive");
    return x;
  }

 private:
  ProblemKind kind_;
  std::string origin_;
  std::vector<ProblemEntry> entries_;
  std::string text_;
};

inline ProblemFile parse_problem(std::string_view text, const std::string& origin) {
  std::optional<ProblemKind> kind;
  std::vector<ProblemEntry> entries;
  std::map<std::string, int, std::less<>> seen;
  std::string canonical;
  int lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto raw = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    auto line = detail::trim(raw);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ProblemError(origin, lineno, "expected 'key = value'");
    std::string key(detail::trim(line.substr(0, eq)));
    std::string value(detail::trim(line.substr(eq + 1)));
    if (key.empty()) throw ProblemError(origin, lineno, "empty key");
    if (value.empty()) throw ProblemError(origin, lineno, "key '" + key + "': empty value");

    if (!kind) {
      if (key != "kind") throw ProblemError(origin, lineno, "first key must be 'kind', got '" + key + "'");
      kind = parse_kind(value);
      if (!kind) throw ProblemError(origin, lineno, "key 'kind': unknown kind '" + value + "'");
      canonical += "kind = " + value + "\n";
      continue;
    }
    if (key == "kind") throw ProblemError(origin, lineno, "key 'kind' given twice");
    const auto& keys = allowed_keys(*kind);
    auto it = std::find_if(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.name == key; });
    if (it == keys.end())
      throw ProblemError(origin, lineno, "unknown key '" + key + "' for kind " + std::string(kind_name(*kind)));
    if (!it->repeatable && seen.count(key))
      throw ProblemError(origin, lineno,
                         "key '" + key + "' given twice (first on line " + std::to_string(seen[key]) + ")");
    seen.emplace(key, lineno);

    std::istringstream in(value);
    std::string normalised;
    for (std::string tok; in >> tok;) normalised += (normalised.empty() ? "" : " ") + tok;
    canonical += key + " = " + normalised + "\n";
    entries.push_back({key, normalised, lineno});
  }
  if (!kind) throw ProblemError(origin, 0, "missing 'kind'");
  for (const auto& k : allowed_keys(*kind))
    if (k.required && !seen.count(k.name))
      throw ProblemError(origin, 0, "missing required key '" + std::string(k.name) + "'");
  return ProblemFile(*kind, origin, std::move(entries), std::move(canonical));
}

inline ProblemFile load_problem(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open problem file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem(buf.str(), path);
}

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t x) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, x >>= 4) s[i] = digits[x & 0xf];
  return s;
}

}  // namespace minsing
