#include "udm/series.hpp"

#include <algorithm>
#include <charconv>

namespace udm {

Rational parse_rational(std::string_view text) {
  auto bad = [&] { throw std::invalid_argument("malformed rational: '" + std::string(text) + "'"); };
  if (text.empty()) bad();
  const auto slash = text.find('/');
  try {
    if (slash == std::string_view::npos) {
      return Rational(BigInt(std::string(text)));
    }
    BigInt num{std::string(text.substr(0, slash))};
    BigInt den{std::string(text.substr(slash + 1))};
    if (den == 0) throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    bad();
  }
  return {};
}

std::string rational_to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

double rational_to_double(const Rational& q) { return q.convert_to<double>(); }

Rational factorial(int n) {
  BigInt f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return Rational(f);
}

}  // namespace udm

namespace udm::series {

TruncatedSeries::TruncatedSeries(int order) {
  if (order < 0) throw std::invalid_argument("truncation order must be non-negative");
  coeffs_.assign(static_cast<size_t>(order) + 1, Rational(0));
}

TruncatedSeries::TruncatedSeries(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw std::invalid_argument("coefficient list must be non-empty");
}

TruncatedSeries TruncatedSeries::monomial(int power, const Rational& c, int order) {
  TruncatedSeries s(order);
  if (power < 0) throw std::invalid_argument("monomial power must be non-negative");
  if (power <= order) s.coeffs_[static_cast<size_t>(power)] = c;
  return s;
}

TruncatedSeries TruncatedSeries::variable(int order) { return monomial(1, Rational(1), order); }

const Rational& TruncatedSeries::at(int k) const {
  static const Rational zero(0);
  if (k < 0) throw std::out_of_range("negative series index");
  if (k > order()) return zero;
  return coeffs_[static_cast<size_t>(k)];
}

bool TruncatedSeries::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Rational& c) { return c == 0; });
}

TruncatedSeries TruncatedSeries::truncated(int order) const {
  std::vector<Rational> c(static_cast<size_t>(order) + 1, Rational(0));
  const size_t n = std::min(c.size(), coeffs_.size());
  std::copy_n(coeffs_.begin(), n, c.begin());
  return TruncatedSeries(std::move(c));
}

TruncatedSeries add(const TruncatedSeries& a, const TruncatedSeries& b) {
  const int k = std::min(a.order(), b.order());
  std::vector<Rational> c(static_cast<size_t>(k) + 1);
  for (int i = 0; i <= k; ++i) c[static_cast<size_t>(i)] = a.at(i) + b.at(i);
  return TruncatedSeries(std::move(c));
}

TruncatedSeries subtract(const TruncatedSeries& a, const TruncatedSeries& b) {
  const int k = std::min(a.order(), b.order());
  std::vector<Rational> c(static_cast<size_t>(k) + 1);
  for (int i = 0; i <= k; ++i) c[static_cast<size_t>(i)] = a.at(i) - b.at(i);
  return TruncatedSeries(std::move(c));
}

TruncatedSeries multiply(const TruncatedSeries& a, const TruncatedSeries& b) {
  const int k = std::min(a.order(), b.order());
  std::vector<Rational> c(static_cast<size_t>(k) + 1, Rational(0));
  for (int i = 0; i <= k; ++i) {
    if (a.at(i) == 0) continue;
    for (int j = 0; i + j <= k; ++j) {
      if (b.at(j) == 0) continue;
      c[static_cast<size_t>(i + j)] += a.at(i) * b.at(j);
    }
  }
  return TruncatedSeries(std::move(c));
}

TruncatedSeries scale(const TruncatedSeries& a, const Rational& c) {
  std::vector<Rational> out(a.coefficients());
  for (auto& x : out) x *= c;
  return TruncatedSeries(std::move(out));
}

TruncatedSeries compose(const TruncatedSeries& g, const TruncatedSeries& f) {
  if (f.at(0) != 0) throw NonzeroConstantTermError("composition requires a zero constant term in the inner series");
  const int k = std::min(g.order(), f.order());
  // Horner: result = (...(g_K f + g_{K-1}) f + ...) f + g_0.
  TruncatedSeries result = TruncatedSeries::monomial(0, g.at(k), k);
  const TruncatedSeries ft = f.truncated(k);
  for (int j = k - 1; j >= 0; --j) {
    result = multiply(result, ft);
    result = add(result, TruncatedSeries::monomial(0, g.at(j), k));
  }
  return result;
}

TruncatedSeries solve_branch(const TruncatedSeries& G, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("branch sign must be +1 or -1");
  if (G.at(0) != 0 || G.at(1) != 0 || G.at(2) != 1) {
    throw BadNormalizationError("solve_branch requires G_0 = G_1 = 0 and G_2 = 1");
  }
  const int k = G.order();
  const Rational c1(sign);

  // Work one order above K so the constraint at s^{K+1} pins c_K; G's
  // coefficients beyond its order are exactly zero (polynomial semantics).
  const TruncatedSeries g_ext = G.truncated(k + 1);
  std::vector<Rational> c(static_cast<size_t>(k + 2), Rational(0));
  c[1] = c1;

  for (int m = 3; m <= k + 1; ++m) {
    // With c_{m-1} still zero, the s^m coefficient of G(F) misses exactly
    // the 2*c_1*c_{m-1} cross term from the quadratic part of G.
    const Rational t = compose(g_ext, TruncatedSeries(c)).at(m);
    c[static_cast<size_t>(m - 1)] = -t / (2 * c1);
  }

  c.resize(static_cast<size_t>(k) + 1);
  return TruncatedSeries(std::move(c));
}

TruncatedSeries ball_mass_expansion(const TruncatedSeries& G) {
  return subtract(solve_branch(G, +1), solve_branch(G, -1));
}

}  // namespace udm::series
