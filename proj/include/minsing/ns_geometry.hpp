#pragma once

// Divisor classes in a Neron-Severi lattice, polyhedral pseudo-effective
// cones, and the intersection arithmetic of the blown-up P^3 example whose
// base locus is the quartic elliptic curve Y = Q1 n Q2.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minsing/errors.hpp"
#include "minsing/rational.hpp"

namespace minsing {

struct DivisorClass {
  RationalVector coords;
  std::optional<std::string> label;

  std::size_t rank() const { return coords.size(); }

  friend DivisorClass operator+(const DivisorClass& a, const DivisorClass& b) {
    if (a.rank() != b.rank()) throw InputError("divisor class rank mismatch");
    DivisorClass out{a.coords, std::nullopt};
    for (std::size_t i = 0; i < out.coords.size(); ++i) out.coords[i] += b.coords[i];
    return out;
  }
  friend DivisorClass operator*(const Rational& q, const DivisorClass& a) {
    DivisorClass out{a.coords, std::nullopt};
    for (auto& c : out.coords) c *= q;
    return out;
  }
  friend DivisorClass operator-(const DivisorClass& a, const DivisorClass& b) {
    return a + Rational(-1) * b;
  }
};

/// {v : <l_i, v> >= 0 for all i}. An empty halfspace list is the whole space.
class PsefCone {
 public:
  PsefCone(std::size_t rank, std::vector<RationalVector> halfspaces)
      : rank_(rank), halfspaces_(std::move(halfspaces)) {
    if (rank_ == 0) throw InputError("cone rank must be positive");
    for (const auto& h : halfspaces_)
      if (h.size() != rank_) throw InputError("cone functional has wrong length");
  }

  /// The closed half-line {x >= 0} of degrees on a curve.
  static PsefCone nonnegative_degree() { return PsefCone(1, {{Rational(1)}}); }

  std::size_t rank() const { return rank_; }
  const std::vector<RationalVector>& halfspaces() const { return halfspaces_; }

 private:
  std::size_t rank_;
  std::vector<RationalVector> halfspaces_;
};

inline bool cone_contains(const PsefCone& cone, const DivisorClass& v) {
  if (v.rank() != cone.rank())
    throw InputError("class of rank " + std::to_string(v.rank()) + " tested against cone of rank " +
                     std::to_string(cone.rank()));
  for (const auto& l : cone.halfspaces())
    if (dot(l, v.coords) < 0) return false;
  return true;
}

/// Bl_{p_1..p_N} P^3 with basis (H, E_1, ..., E_N) and the strict transform
/// Y of the complete intersection of two quadrics through the p_i.
class BlowupExample {
 public:
  explicit BlowupExample(int n_points) : n_(n_points) {
    if (n_ < 1) throw InputError("blow-up needs at least one point");
    pairings_.assign(static_cast<std::size_t>(n_) + 1, Rational(1));
    pairings_[0] = 4;  // deg Q1 * deg Q2
  }

  int n_points() const { return n_; }
  std::size_t rank() const { return pairings_.size(); }
  const RationalVector& curve_pairings() const { return pairings_; }

  DivisorClass hyperplane() const { return basis(0, "H"); }
  DivisorClass exceptional(int i) const {
    if (i < 1 || i > n_) throw InputError("exceptional divisor index out of range");
    return basis(static_cast<std::size_t>(i), "E_" + std::to_string(i));
  }
  /// E = E_1 + ... + E_N
  DivisorClass total_exceptional() const {
    DivisorClass e{RationalVector(rank(), Rational(1)), std::string("E")};
    e.coords[0] = 0;
    return e;
  }
  /// a*H - b*E
  DivisorClass combination(const Rational& a, const Rational& b) const {
    auto d = a * hyperplane() - b * total_exceptional();
    return d;
  }
  /// L = H + D_1 = 3H - E
  DivisorClass line_bundle() const {
    auto l = combination(3, 1);
    l.label = "L";
    return l;
  }
  /// D_i in |2H - E|, the strict transforms of the two quadrics.
  DivisorClass quadric() const {
    auto d = combination(2, 1);
    d.label = "D";
    return d;
  }

 private:
  DivisorClass basis(std::size_t i, std::string label) const {
    DivisorClass d{RationalVector(rank(), Rational(0)), std::move(label)};
    d.coords[i] = 1;
    return d;
  }

  int n_;
  RationalVector pairings_;
};

inline Rational curve_pairing(const BlowupExample& ex, const DivisorClass& cls) {
  if (cls.rank() != ex.rank())
    throw InputError("class of rank " + std::to_string(cls.rank()) + " does not live on Bl_" +
                     std::to_string(ex.n_points()) + " P^3");
  return dot(ex.curve_pairings(), cls.coords);
}

struct ZariskiDegrees {
  Rational deg_l_restr;  // deg L|_Y
  Rational deg_n1;       // deg N_1 = (D_1 . Y)
  Rational deg_n2;
};

inline ZariskiDegrees zariski_degrees(int n) {
  BlowupExample ex(n);
  auto d = curve_pairing(ex, ex.quadric());
  return {curve_pairing(ex, ex.line_bundle()), d, d};
}

inline bool is_nef_zariski(int n) {
  // Y is the only curve L can meet negatively.
  return zariski_degrees(n).deg_l_restr >= 0;
}

}  // namespace minsing
