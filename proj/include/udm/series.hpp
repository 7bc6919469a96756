#pragma once

#include <stdexcept>
#include <vector>

#include "udm/rational.hpp"

namespace udm::series {

class NonzeroConstantTermError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class BadNormalizationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Power series with exact rational coefficients, known through a fixed
/// truncation order K (coefficients 0..K inclusive). Values are immutable
/// after construction; every operation is a pure function and results carry
/// the minimum truncation order of their operands.
class TruncatedSeries {
 public:
  /// Zero series of the given truncation order.
  explicit TruncatedSeries(int order);

  /// Series from an explicit coefficient list; order = coeffs.size() - 1.
  explicit TruncatedSeries(std::vector<Rational> coeffs);

  /// c * s^power, truncated at `order`.
  static TruncatedSeries monomial(int power, const Rational& c, int order);

  /// The identity series s.
  static TruncatedSeries variable(int order);

  int order() const { return static_cast<int>(coeffs_.size()) - 1; }

  /// Coefficient of s^k; zero for k > order.
  const Rational& at(int k) const;

  const std::vector<Rational>& coefficients() const { return coeffs_; }

  bool is_zero() const;

  /// Copy re-truncated (or zero-extended, with polynomial semantics) to
  /// `order`.
  TruncatedSeries truncated(int order) const;

  bool operator==(const TruncatedSeries& other) const = default;

 private:
  std::vector<Rational> coeffs_;
};

TruncatedSeries add(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries subtract(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries multiply(const TruncatedSeries& a, const TruncatedSeries& b);
TruncatedSeries scale(const TruncatedSeries& a, const Rational& c);

inline TruncatedSeries operator+(const TruncatedSeries& a, const TruncatedSeries& b) { return add(a, b); }
inline TruncatedSeries operator-(const TruncatedSeries& a, const TruncatedSeries& b) { return subtract(a, b); }
inline TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) { return multiply(a, b); }

/// g(f(s)). Requires f to have zero constant term; throws
/// NonzeroConstantTermError otherwise.
TruncatedSeries compose(const TruncatedSeries& g, const TruncatedSeries& f);

/// Solves G(F(s)) = s^2 order by order for the branch with F_1 = sign,
/// treating G as a polynomial of degree order(G). Requires the
/// normalization G_0 = G_1 = 0, G_2 = 1; throws BadNormalizationError
/// otherwise. The result has the same truncation order as G and satisfies
/// compose(G, F) = s^2 exactly through that order.
TruncatedSeries solve_branch(const TruncatedSeries& G, int sign);

/// solve_branch(G,+1) - solve_branch(G,-1): the ball-mass series f(r).
TruncatedSeries ball_mass_expansion(const TruncatedSeries& G);

}  // namespace udm::series
