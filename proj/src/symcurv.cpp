#include "udm/symcurv.hpp"

#include <algorithm>
#include <sstream>

namespace udm::symcurv {

namespace {

FactorKey canonical(FactorKey key) {
  std::sort(key.begin(), key.end());
  return key;
}

}  // namespace

void CurvaturePolynomial::add_term(const FactorKey& key, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(key, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

CurvaturePolynomial CurvaturePolynomial::constant(const Rational& c) {
  CurvaturePolynomial p;
  p.add_term({}, c);
  return p;
}

CurvaturePolynomial CurvaturePolynomial::curvature(int index, int deriv) {
  if (index < 1 || deriv < 0) throw std::invalid_argument("bad curvature symbol");
  CurvaturePolynomial p;
  p.add_term({CurvatureFactor{index, deriv}}, Rational(1));
  return p;
}

CurvaturePolynomial CurvaturePolynomial::from_monomials(std::span<const CurvatureMonomial> ms) {
  CurvaturePolynomial p;
  for (const auto& m : ms) p.add_term(canonical(m.factors), m.coeff);
  return p;
}

std::vector<CurvatureMonomial> CurvaturePolynomial::monomials() const {
  std::vector<CurvatureMonomial> out;
  out.reserve(terms_.size());
  for (const auto& [key, c] : terms_) out.push_back(CurvatureMonomial{key, c});
  return out;
}

CurvaturePolynomial CurvaturePolynomial::operator+(const CurvaturePolynomial& o) const {
  CurvaturePolynomial p = *this;
  for (const auto& [key, c] : o.terms_) p.add_term(key, c);
  return p;
}

CurvaturePolynomial CurvaturePolynomial::operator-(const CurvaturePolynomial& o) const {
  CurvaturePolynomial p = *this;
  for (const auto& [key, c] : o.terms_) p.add_term(key, -c);
  return p;
}

CurvaturePolynomial CurvaturePolynomial::operator*(const CurvaturePolynomial& o) const {
  CurvaturePolynomial p;
  for (const auto& [ka, ca] : terms_) {
    for (const auto& [kb, cb] : o.terms_) {
      FactorKey key;
      key.reserve(ka.size() + kb.size());
      std::merge(ka.begin(), ka.end(), kb.begin(), kb.end(), std::back_inserter(key));
      p.add_term(key, ca * cb);
    }
  }
  return p;
}

CurvaturePolynomial CurvaturePolynomial::scaled(const Rational& c) const {
  CurvaturePolynomial p;
  if (c == 0) return p;
  for (const auto& [key, coeff] : terms_) p.add_term(key, coeff * c);
  return p;
}

CurvaturePolynomial CurvaturePolynomial::derivative() const {
  CurvaturePolynomial p;
  for (const auto& [key, c] : terms_) {
    for (size_t i = 0; i < key.size(); ++i) {
      FactorKey d = key;
      d[i].deriv += 1;
      p.add_term(canonical(std::move(d)), c);
    }
  }
  return p;
}

double CurvaturePolynomial::evaluate_constant(std::span<const double> kappas) const {
  double total = 0.0;
  for (const auto& [key, c] : terms_) {
    double v = rational_to_double(c);
    for (const auto& f : key) {
      if (f.deriv > 0 || f.index > static_cast<int>(kappas.size())) {
        v = 0.0;
        break;
      }
      v *= kappas[static_cast<size_t>(f.index - 1)];
    }
    total += v;
  }
  return total;
}

Rational CurvaturePolynomial::evaluate_constant_exact(std::span<const Rational> kappas) const {
  Rational total(0);
  for (const auto& [key, c] : terms_) {
    Rational v = c;
    for (const auto& f : key) {
      if (f.deriv > 0 || f.index > static_cast<int>(kappas.size())) {
        v = 0;
        break;
      }
      v *= kappas[static_cast<size_t>(f.index - 1)];
    }
    total += v;
  }
  return total;
}

std::string monomial_to_text(const CurvatureMonomial& m) {
  std::ostringstream os;
  os << rational_to_string(m.coeff);
  if (m.factors.empty()) return os.str();
  os << " *";
  for (size_t i = 0; i < m.factors.size();) {
    size_t j = i;
    while (j < m.factors.size() && m.factors[j] == m.factors[i]) ++j;
    os << " k" << m.factors[i].index;
    for (int d = 0; d < m.factors[i].deriv; ++d) os << "'";
    if (j - i > 1) os << "^" << (j - i);
    i = j;
  }
  return os.str();
}

std::string CurvaturePolynomial::to_text() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& m : monomials()) {
    if (!first) os << "\n";
    os << monomial_to_text(m);
    first = false;
  }
  return os.str();
}

CurvaturePolynomial specialize_constant(const CurvaturePolynomial& p, int up_to_h) {
  CurvaturePolynomial out;
  for (const auto& [key, c] : p.terms_) {
    const bool killed = std::any_of(key.begin(), key.end(), [&](const CurvatureFactor& f) {
      return f.deriv >= 1 && f.index <= up_to_h;
    });
    if (!killed) out.add_term(key, c);
  }
  return out;
}

FrameExpansion expand_derivative(int alpha, int n) {
  if (alpha < 1 || n < 2) throw std::invalid_argument("expand_derivative requires alpha >= 1, n >= 2");
  FrameExpansion e;
  e.derivative_order = 1;
  e.ambient_dimension = n;
  e.components.assign(static_cast<size_t>(n), CurvaturePolynomial{});
  e.components[0] = CurvaturePolynomial::constant(Rational(1));  // gamma' = E_1

  for (int a = 2; a <= alpha; ++a) {
    std::vector<CurvaturePolynomial> next(static_cast<size_t>(n));
    for (int j = 1; j <= n; ++j) {
      CurvaturePolynomial p = e.components[static_cast<size_t>(j - 1)].derivative();
      // E_{j-1}' feeds kappa_{j-1} E_j; E_{j+1}' feeds -kappa_j E_j.
      if (j >= 2) {
        p = p + e.components[static_cast<size_t>(j - 2)] * CurvaturePolynomial::curvature(j - 1);
      }
      if (j < n) {
        p = p - e.components[static_cast<size_t>(j)] * CurvaturePolynomial::curvature(j);
      }
      next[static_cast<size_t>(j - 1)] = std::move(p);
    }
    e.components = std::move(next);
    e.derivative_order = a;
  }
  return e;
}

int GraphPath::sign() const {
  int s = 1;
  for (int e : edge_sign) s *= e;
  return s;
}

CurvatureMonomial GraphPath::monomial(const DerivativePlacement& p) const {
  FactorKey key;
  key.reserve(edge_kappa.size());
  for (size_t i = 0; i < edge_kappa.size(); ++i) {
    key.push_back(CurvatureFactor{edge_kappa[i], p.orders[i]});
  }
  std::sort(key.begin(), key.end());
  return CurvatureMonomial{std::move(key), Rational(sign()) * Rational(p.weight)};
}

namespace {

// Number of admissible differentiation orders realizing a placement: the
// walk's extension steps are interleaved with the derivative hits, and a
// hit on the factor born at extension i+1 must come after that extension.
// Recursion over the last move of the sequence, memoized.
class InterleavingCounter {
 public:
  std::int64_t count(int extensions, std::vector<int> remaining) {
    while (!remaining.empty() && remaining.back() == 0 &&
           static_cast<int>(remaining.size()) > extensions - 1) {
      remaining.pop_back();
    }
    if (extensions == 1) {
      for (int r : remaining)
        if (r != 0) return 0;
      return 1;
    }
    const Key key{extensions, remaining};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    std::int64_t total = 0;
    // Last move is the final extension: legal only once every derivative of
    // its factor (index extensions-1) has been placed.
    const size_t born_last = static_cast<size_t>(extensions - 2);
    if (born_last >= remaining.size() || remaining[born_last] == 0) {
      total += count(extensions - 1, remaining);
    }
    // Last move is a derivative hit on factor i.
    for (size_t i = 0; i < remaining.size(); ++i) {
      if (remaining[i] == 0) continue;
      std::vector<int> next = remaining;
      next[i] -= 1;
      total += count(extensions, std::move(next));
    }
    memo_.emplace(key, total);
    return total;
  }

 private:
  using Key = std::pair<int, std::vector<int>>;
  std::map<Key, std::int64_t> memo_;
};

void enumerate_placements(int factors, int total_derivs, InterleavingCounter& counter,
                          int extensions, std::vector<DerivativePlacement>& out) {
  std::vector<int> orders(static_cast<size_t>(factors), 0);
  // Stars and bars over the factors, with repetitions allowed.
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == factors) {
      if (left == 0) {
        const std::int64_t w = counter.count(extensions, orders);
        if (w > 0) out.push_back(DerivativePlacement{orders, w});
      }
      return;
    }
    for (int take = 0; take <= left; ++take) {
      orders[static_cast<size_t>(pos)] = take;
      self(self, pos + 1, left - take);
    }
    orders[static_cast<size_t>(pos)] = 0;
  };
  if (factors == 0) {
    if (total_derivs == 0) out.push_back(DerivativePlacement{{}, 1});
    return;
  }
  rec(rec, 0, total_derivs);
}

}  // namespace

std::vector<GraphPath> enumerate_paths(int alpha, int n, int end_j) {
  if (alpha < 1 || n < 2) throw std::invalid_argument("enumerate_paths requires alpha >= 1, n >= 2");
  if (end_j < 1 || end_j > n) throw std::invalid_argument("end vertex out of range");

  std::vector<GraphPath> out;
  InterleavingCounter counter;

  GraphPath path;
  path.vertices = {1};
  auto emit = [&](const GraphPath& p) {
    const int len = p.length();
    const int derivs = alpha - len;
    GraphPath done = p;
    enumerate_placements(static_cast<int>(done.edge_kappa.size()), derivs, counter, len,
                         done.placements);
    if (!done.placements.empty()) out.push_back(std::move(done));
  };

  auto dfs = [&](auto&& self) -> void {
    if (path.vertices.back() == end_j) emit(path);
    if (path.length() == alpha) return;
    const int v = path.vertices.back();
    for (int next : {v - 1, v + 1}) {
      if (next < 1 || next > n) continue;
      const int lo = std::min(v, next);
      path.vertices.push_back(next);
      path.edge_kappa.push_back(lo);
      path.edge_sign.push_back(next > v ? +1 : -1);
      self(self);
      path.vertices.pop_back();
      path.edge_kappa.pop_back();
      path.edge_sign.pop_back();
    }
  };
  dfs(dfs);
  return out;
}

FrameExpansion expansion_from_paths(int alpha, int n) {
  FrameExpansion e;
  e.derivative_order = alpha;
  e.ambient_dimension = n;
  e.components.assign(static_cast<size_t>(n), CurvaturePolynomial{});
  for (int j = 1; j <= n; ++j) {
    std::vector<CurvatureMonomial> ms;
    for (const auto& path : enumerate_paths(alpha, n, j)) {
      for (const auto& placement : path.placements) ms.push_back(path.monomial(placement));
    }
    e.components[static_cast<size_t>(j - 1)] = CurvaturePolynomial::from_monomials(ms);
  }
  return e;
}

CurvaturePolynomial C_coefficient(int k, int n) {
  if (k < 2) throw std::invalid_argument("C_coefficient requires k >= 2");
  std::vector<FrameExpansion> derivs;
  derivs.reserve(static_cast<size_t>(k));
  for (int a = 1; a <= k - 1; ++a) derivs.push_back(expand_derivative(a, n));

  CurvaturePolynomial c;
  for (int a = 1; a <= k - 1; ++a) {
    const int b = k - a;
    if (b < 1) continue;
    const auto& pa = derivs[static_cast<size_t>(a - 1)].components;
    const auto& pb = derivs[static_cast<size_t>(b - 1)].components;
    CurvaturePolynomial inner;
    for (int j = 0; j < n; ++j) {
      inner = inner + pa[static_cast<size_t>(j)] * pb[static_cast<size_t>(j)];
    }
    c = c + inner.scaled(Rational(1) / (factorial(a) * factorial(b)));
  }
  return c;
}

OddVanishingCertificate verify_odd_vanishing(int h, int n) {
  if (h < 1) throw std::invalid_argument("verify_odd_vanishing requires h >= 1");
  const CurvaturePolynomial c = specialize_constant(C_coefficient(2 * h + 3, n), h);
  OddVanishingCertificate cert;
  cert.vanished = c.is_zero();
  if (!cert.vanished) cert.survivors = c.monomials();
  return cert;
}

TopMonomial extract_top_monomial(int h, int n) {
  if (h < 0) throw std::invalid_argument("extract_top_monomial requires h >= 0");
  if (n < h + 2) throw std::invalid_argument("ambient dimension too small to carry kappa_{h+1}");
  const CurvaturePolynomial c = specialize_constant(C_coefficient(2 * (h + 2), n), h);

  std::vector<CurvatureMonomial> bearing;
  for (const auto& m : c.monomials()) {
    const bool has_top = std::any_of(m.factors.begin(), m.factors.end(),
                                     [&](const CurvatureFactor& f) { return f.index == h + 1; });
    if (has_top) bearing.push_back(m);
  }
  if (bearing.size() != 1) {
    throw StructureViolationError("expected exactly one kappa_" + std::to_string(h + 1) +
                                  "-bearing monomial, found " + std::to_string(bearing.size()));
  }
  FactorKey expected;
  for (int i = 1; i <= h + 1; ++i) {
    expected.push_back(CurvatureFactor{i, 0});
    expected.push_back(CurvatureFactor{i, 0});
  }
  if (bearing[0].factors != expected) {
    throw StructureViolationError("kappa_" + std::to_string(h + 1) +
                                  "-bearing monomial is not (k1...k" + std::to_string(h + 1) + ")^2: " +
                                  monomial_to_text(bearing[0]));
  }
  if (bearing[0].coeff == 0) {
    throw StructureViolationError("vanishing top-monomial coefficient");
  }

  TopMonomial top;
  top.coefficient_in_C = bearing[0].coeff;
  top.sign_in_C = bearing[0].coeff > 0 ? +1 : -1;
  top.monomial = bearing[0];
  if (top.monomial.coeff < 0) top.monomial.coeff = -top.monomial.coeff;
  return top;
}

}  // namespace udm::symcurv
