#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "minsing/errors.hpp"

namespace minsing {

using Rational = boost::multiprecision::cpp_rational;
using RationalVector = std::vector<Rational>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline bool is_integer_literal(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

}  // namespace detail

/// Parses "p/q" or an integer literal. Decimals are rejected so that facet
/// data stays exact.
inline Rational parse_rational(std::string_view text) {
  auto s = detail::trim(text);
  auto slash = s.find('/');
  auto num = s.substr(0, slash);
  if (!detail::is_integer_literal(num)) throw InputError("not a rational: '" + std::string(text) + "'");
  if (num.front() == '+') num.remove_prefix(1);
  if (slash == std::string_view::npos) return Rational(boost::multiprecision::cpp_int(std::string(num)));
  auto den = s.substr(slash + 1);
  if (!detail::is_integer_literal(den)) throw InputError("not a rational: '" + std::string(text) + "'");
  if (den.front() == '+') den.remove_prefix(1);
  boost::multiprecision::cpp_int d(std::string{den});
  if (d == 0) throw InputError("zero denominator: '" + std::string(text) + "'");
  return Rational(boost::multiprecision::cpp_int(std::string(num)), d);
}

/// "p/q" in lowest terms, or "p" when the denominator is 1.
inline std::string to_string(const Rational& q) { return q.str(); }

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline Rational dot(const RationalVector& a, const RationalVector& b) {
  Rational acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace minsing
