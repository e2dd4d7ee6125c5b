#ifndef ISOCHRON_RESULTANT_HPP
#define ISOCHRON_RESULTANT_HPP

#include <map>
#include <vector>

#include <Eigen/Dense>

#include "isochron/bivar_poly.hpp"
#include "isochron/univariate.hpp"

namespace isochron {

/// Polynomial in (x, y) whose coefficients are dense polynomials in a parameter h.
template <Field S>
class HBivarPoly {
 public:
  HBivarPoly() = default;
  explicit HBivarPoly(const BivarPoly<S>& p) {
    for (const auto& [e, c] : p.terms()) terms_[e] = {c};
  }

  /// p(x, y) - h.
  static HBivarPoly levelSet(const BivarPoly<S>& p) {
    HBivarPoly out(p);
    auto& c = out.terms_[{0, 0}];
    if (c.empty()) c.push_back(ScalarTraits<S>::zero());
    if (c.size() < 2) c.resize(2, ScalarTraits<S>::zero());
    c[1] -= ScalarTraits<S>::one();
    return out;
  }

  const std::map<Exponent, DensePoly<S>>& terms() const { return terms_; }

  BivarPoly<S> atH(const S& h) const {
    BivarPoly<S> out;
    for (const auto& [e, c] : terms_) out.add(e.first, e.second, evalDense(c, h));
    return out;
  }

  HBivarPoly derivativeY() const {
    HBivarPoly out;
    for (const auto& [e, c] : terms_) {
      if (e.second == 0) continue;
      DensePoly<S> d = c;
      for (auto& v : d) v *= ScalarTraits<S>::fromInt(e.second);
      out.terms_[{e.first, e.second - 1}] = d;
    }
    return out;
  }

  int degreeY() const {
    int d = -1;
    for (const auto& [e, c] : terms_)
      if (!isZeroPoly(c)) d = std::max(d, e.second);
    return d;
  }
  int degreeTotal() const {
    int d = -1;
    for (const auto& [e, c] : terms_)
      if (!isZeroPoly(c)) d = std::max(d, e.first + e.second);
    return d;
  }
  int degreeX() const {
    int d = -1;
    for (const auto& [e, c] : terms_)
      if (!isZeroPoly(c)) d = std::max(d, e.first);
    return d;
  }
  int degreeH() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, static_cast<int>(trimmedExact(c).size()) - 1);
    return d;
  }
  bool isZero() const { return degreeY() < 0; }

  /// Coefficients of y^0..y^formalDegree at the point (h, x).
  std::vector<S> yCoefficientsAt(const S& h, const S& x, int formalDegree) const {
    std::vector<S> out(formalDegree + 1, ScalarTraits<S>::zero());
    for (const auto& [e, c] : terms_) {
      if (e.second > formalDegree) continue;
      S t = evalDense(c, h);
      for (int k = 0; k < e.first; ++k) t *= x;
      out[e.second] += t;
    }
    return out;
  }

  /// The y^j coefficient as a polynomial in x, if it does not depend on h.
  DensePoly<S> yCoefficientInX(int j, bool& dependsOnH) const {
    DensePoly<S> out;
    dependsOnH = false;
    for (const auto& [e, c] : terms_) {
      if (e.second != j) continue;
      const auto t = trimmedExact(c);
      if (t.size() > 1) dependsOnH = true;
      if (t.empty()) continue;
      if (static_cast<int>(out.size()) <= e.first) out.resize(e.first + 1, ScalarTraits<S>::zero());
      out[e.first] += t[0];
    }
    return out;
  }

 private:
  static DensePoly<S> trimmedExact(DensePoly<S> c) {
    while (!c.empty() && isExactlyZero(c.back())) c.pop_back();
    return c;
  }
  static bool isZeroPoly(const DensePoly<S>& c) { return trimmedExact(c).empty(); }

  std::map<Exponent, DensePoly<S>> terms_;
};

/// Polynomial in x whose coefficients are dense polynomials in h: coeffs[k] multiplies x^k.
template <Field S>
struct UniPolyOverH {
  std::vector<DensePoly<S>> coeffs;

  DensePoly<S> atH(const S& h) const {
    DensePoly<S> out;
    out.reserve(coeffs.size());
    for (const auto& c : coeffs) out.push_back(evalDense(c, h));
    return out;
  }
  S eval(const S& h, const S& x) const { return evalDense(atH(h), x); }
  Complex evalComplex(Complex h, Complex x) const {
    DensePoly<Complex> px;
    for (const auto& c : coeffs) px.push_back(evalDense(c, h));
    return evalDense(px, x);
  }
  bool isZero() const { return coeffs.empty(); }
};

template <Field S>
using SylvesterMatrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

/// Sylvester matrix of p, q given by ascending coefficients with formal degrees dp, dq.
template <Field S>
SylvesterMatrix<S> sylvesterMatrix(const std::vector<S>& p, const std::vector<S>& q) {
  const int dp = static_cast<int>(p.size()) - 1;
  const int dq = static_cast<int>(q.size()) - 1;
  const int m = dp + dq;
  SylvesterMatrix<S> s(m, m);
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) s(r, c) = ScalarTraits<S>::zero();
  for (int r = 0; r < dq; ++r)
    for (int k = 0; k <= dp; ++k) s(r, r + k) = p[dp - k];
  for (int r = 0; r < dp; ++r)
    for (int k = 0; k <= dq; ++k) s(dq + r, r + k) = q[dq - k];
  return s;
}

/// Fraction-free (Bareiss) determinant with row pivoting on exact zeros.
template <Field S>
S bareissDeterminant(SylvesterMatrix<S> a) {
  const int n = static_cast<int>(a.rows());
  if (n == 0) return ScalarTraits<S>::one();
  S prev = ScalarTraits<S>::one();
  bool negate = false;
  for (int k = 0; k < n - 1; ++k) {
    if (isExactlyZero(a(k, k))) {
      int swap = -1;
      for (int r = k + 1; r < n; ++r)
        if (!isExactlyZero(a(r, k))) {
          swap = r;
          break;
        }
      if (swap < 0) return ScalarTraits<S>::zero();
      a.row(k).swap(a.row(swap));
      negate = !negate;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
    prev = a(k, k);
  }
  S det = a(n - 1, n - 1);
  return negate ? -det : det;
}

/// Resultant of two univariate polynomials with formal degrees size()-1.
template <Field S>
S resultantOf(const std::vector<S>& p, const std::vector<S>& q) {
  const int dp = static_cast<int>(p.size()) - 1;
  const int dq = static_cast<int>(q.size()) - 1;
  if (dp < 0 || dq < 0) throw DegenerateResultant("empty coefficient vector");
  if constexpr (ScalarTraits<S>::kExact) {
    return bareissDeterminant<S>(sylvesterMatrix(p, q));
  } else {
    if (dp == 0 && dq == 0) return ScalarTraits<S>::one();
    return sylvesterMatrix(p, q).partialPivLu().determinant();
  }
}

/// Res_y(p, q) as a polynomial in x with coefficients in h.
template <Field S>
UniPolyOverH<S> resultantInY(const HBivarPoly<S>& p, const HBivarPoly<S>& q);

/// Discriminant of p with respect to y, divided by the leading y-coefficient.
template <Field S>
UniPolyOverH<S> discriminantInY(const HBivarPoly<S>& p);

/// Pointwise floating discriminant: Sylvester determinant by pivoted LU at (h, x).
Complex discriminantAt(const HBivarPoly<Complex>& p, Complex h, Complex x);

/// Generic x-degree of D minus its x-degree at h0.
template <Field S>
int degreeDropAt(const UniPolyOverH<S>& d, const S& h0);

/// Generic x-degree (highest x-power whose h-polynomial is nonzero).
template <Field S>
int genericXDegree(const UniPolyOverH<S>& d);

}  // namespace isochron

#endif  // ISOCHRON_RESULTANT_HPP
