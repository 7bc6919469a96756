#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "udm/rational.hpp"

namespace udm::symcurv {

class StructureViolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One symbol kappa_h^(m): curvature of index h >= 1 differentiated m >= 0
/// times with respect to arclength.
struct CurvatureFactor {
  int index = 1;
  int deriv = 0;
  auto operator<=>(const CurvatureFactor&) const = default;
};

/// Canonical product key: factors sorted by (index, deriv).
using FactorKey = std::vector<CurvatureFactor>;

struct CurvatureMonomial {
  FactorKey factors;
  Rational coeff;
  bool operator==(const CurvatureMonomial&) const = default;
};

/// Formal polynomial in the curvature symbols and their arclength
/// derivatives. Monomials with equal factor multisets are merged; zero
/// coefficients are dropped, so the zero polynomial has no terms. Immutable
/// value semantics throughout.
class CurvaturePolynomial {
 public:
  CurvaturePolynomial() = default;

  static CurvaturePolynomial constant(const Rational& c);
  static CurvaturePolynomial curvature(int index, int deriv = 0);
  static CurvaturePolynomial from_monomials(std::span<const CurvatureMonomial> ms);

  bool is_zero() const { return terms_.empty(); }
  size_t term_count() const { return terms_.size(); }

  /// Monomials in canonical (key-sorted) order.
  std::vector<CurvatureMonomial> monomials() const;

  CurvaturePolynomial operator+(const CurvaturePolynomial& o) const;
  CurvaturePolynomial operator-(const CurvaturePolynomial& o) const;
  CurvaturePolynomial operator*(const CurvaturePolynomial& o) const;
  CurvaturePolynomial scaled(const Rational& c) const;

  /// Formal arclength derivative (Leibniz over factors, raising one
  /// derivative order at a time).
  CurvaturePolynomial derivative() const;

  /// Numeric value at constant curvatures kappas[0] = kappa_1, ...;
  /// any factor with deriv >= 1 evaluates to zero, any curvature index
  /// beyond the supplied vector evaluates to zero.
  double evaluate_constant(std::span<const double> kappas) const;

  /// Same, in exact arithmetic.
  Rational evaluate_constant_exact(std::span<const Rational> kappas) const;

  /// One monomial per line, e.g. "-1/12 * k1^2" or "1/4 * k1 k2'".
  std::string to_text() const;

  bool operator==(const CurvaturePolynomial&) const = default;

 private:
  std::map<FactorKey, Rational> terms_;
  void add_term(const FactorKey& key, const Rational& c);
  friend CurvaturePolynomial specialize_constant(const CurvaturePolynomial&, int);
};

std::string monomial_to_text(const CurvatureMonomial& m);

/// Deletes every monomial containing a derivative factor (deriv >= 1) of a
/// curvature with index <= up_to_h.
CurvaturePolynomial specialize_constant(const CurvaturePolynomial& p, int up_to_h);

/// Frenet-frame coordinates of the alpha-th derivative of an
/// arclength-parametrized curve in R^n: gamma^(alpha) = sum_j components[j-1] E_j.
struct FrameExpansion {
  int derivative_order = 0;
  int ambient_dimension = 0;
  std::vector<CurvaturePolynomial> components;  // size ambient_dimension
  bool operator==(const FrameExpansion&) const = default;
};

/// Computes FrameExpansion by repeated formal differentiation with the
/// frame equations E_j' = kappa_j E_{j+1} - kappa_{j-1} E_{j-1}.
FrameExpansion expand_derivative(int alpha, int n);

/// One admissible walk on the frame graph * -> E_1 <-> E_2 <-> ... <-> E_n:
/// starts at *, first step to E_1, then moves between neighbours without
/// revisiting *, stopping after length <= alpha steps. Each rightward edge
/// contributes a factor kappa_h, each leftward edge a factor -kappa_h.
/// A placement distributes the remaining alpha - length derivatives over
/// the factors; its weight counts the distinct differentiation orders that
/// realize it, so summing weight * sign * monomial over all paths and
/// placements reproduces the frame expansion.
struct DerivativePlacement {
  std::vector<int> orders;  // derivative order per factor, in step order
  std::int64_t weight = 1;
};

struct GraphPath {
  std::vector<int> vertices;    // E-indices visited, vertices.front() == 1
  std::vector<int> edge_kappa;  // kappa index per step beyond the first
  std::vector<int> edge_sign;   // +1 rightward, -1 leftward
  std::vector<DerivativePlacement> placements;

  int length() const { return static_cast<int>(vertices.size()); }
  int sign() const;
  CurvatureMonomial monomial(const DerivativePlacement& p) const;
};

/// All admissible paths of length <= alpha ending at E_end_j, each carrying
/// all admissible derivative placements.
std::vector<GraphPath> enumerate_paths(int alpha, int n, int end_j);

/// Frame expansion assembled from enumerate_paths; equals
/// expand_derivative(alpha, n) identically.
FrameExpansion expansion_from_paths(int alpha, int n);

/// Taylor coefficient C_k of the squared distance |gamma(s)|^2 about a
/// curve point, as an exact curvature polynomial:
/// C_k = sum_{a+b=k, a,b>=1} <gamma^(a), gamma^(b)> / (a! b!).
CurvaturePolynomial C_coefficient(int k, int n);

struct OddVanishingCertificate {
  bool vanished = false;
  std::vector<CurvatureMonomial> survivors;  // nonempty iff !vanished
};

/// Checks that C_{2h+3} specializes to zero once kappa_1..kappa_h are
/// constant.
OddVanishingCertificate verify_odd_vanishing(int h, int n);

/// The kappa_{h+1}-bearing part of C_{2(h+2)} once kappa_1..kappa_h are
/// constant. Structure checks: there must be exactly one such monomial,
/// its factor multiset must be {kappa_1^2, ..., kappa_{h+1}^2} and its
/// coefficient must be nonzero; StructureViolationError otherwise.
/// `monomial` carries the positive magnitude (the constant that pins
/// kappa_{h+1}^2 given C_{2(h+2)} and the lower curvatures); the sign it
/// carries inside C_{2(h+2)} itself is reported in `sign_in_C`.
struct TopMonomial {
  CurvatureMonomial monomial;  // coeff > 0
  int sign_in_C = 0;           // sign of the coefficient as it appears in C
  Rational coefficient_in_C;
};

TopMonomial extract_top_monomial(int h, int n);

}  // namespace udm::symcurv
