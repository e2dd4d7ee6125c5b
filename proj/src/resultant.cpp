#include "isochron/resultant.hpp"

#include <cmath>

namespace isochron {

namespace {

// Newton divided differences through (nodes[k], values[k]), returned in the monomial basis.
DensePoly<GaussianRational> interpolateExact(const std::vector<GaussianRational>& nodes,
                                             std::vector<GaussianRational> values) {
  const std::size_t n = nodes.size();
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t k = n - 1; k >= level; --k) {
      values[k] = (values[k] - values[k - 1]) / (nodes[k] - nodes[k - level]);
      if (k == level) break;
    }
  DensePoly<GaussianRational> poly{values[n - 1]};
  for (std::size_t k = n - 1; k-- > 0;) {
    // poly = poly * (x - nodes[k]) + values[k]
    DensePoly<GaussianRational> next(poly.size() + 1, GaussianRational{});
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] += poly[i];
      next[i] -= poly[i] * nodes[k];
    }
    next[0] += values[k];
    poly = std::move(next);
  }
  return poly;
}

struct Bounds {
  int xDegree;
  int hDegree;
};

template <Field S>
Bounds resultantBounds(const HBivarPoly<S>& p, const HBivarPoly<S>& q) {
  const int dp = p.degreeY();
  const int dq = q.degreeY();
  const int bezout = std::max(p.degreeTotal(), 0) * std::max(q.degreeTotal(), 0);
  const int rowwise = dq * std::max(p.degreeX(), 0) + dp * std::max(q.degreeX(), 0);
  const int hDeg = dq * std::max(p.degreeH(), 0) + dp * std::max(q.degreeH(), 0);
  return {std::min(bezout, rowwise), hDeg};
}

template <Field S>
UniPolyOverH<S> trimUni(UniPolyOverH<S> u) {
  if constexpr (!ScalarTraits<S>::kExact) {
    double scale = 0.0;
    for (const auto& c : u.coeffs)
      for (const auto& v : c) scale = std::max(scale, std::abs(v));
    for (auto& c : u.coeffs) {
      for (auto& v : c)
        if (std::abs(v) <= kZeroThreshold * scale) v = 0.0;
    }
  }
  for (auto& c : u.coeffs)
    while (!c.empty() && isExactlyZero(c.back())) c.pop_back();
  while (!u.coeffs.empty() && u.coeffs.back().empty()) u.coeffs.pop_back();
  return u;
}

UniPolyOverH<GaussianRational> interpolateResultant(const HBivarPoly<GaussianRational>& p,
                                                    const HBivarPoly<GaussianRational>& q, Bounds b) {
  const int dp = p.degreeY();
  const int dq = q.degreeY();
  std::vector<GaussianRational> xs, hs;
  for (int k = 0; k <= b.xDegree; ++k) xs.emplace_back(k);
  for (int k = 0; k <= b.hDegree; ++k) hs.emplace_back(k);
  // rowsByH[a] = coefficients in x at h = hs[a]
  std::vector<DensePoly<GaussianRational>> rowsByH;
  for (const auto& h : hs) {
    std::vector<GaussianRational> vals;
    vals.reserve(xs.size());
    for (const auto& x : xs) vals.push_back(resultantOf(p.yCoefficientsAt(h, x, dp), q.yCoefficientsAt(h, x, dq)));
    auto poly = interpolateExact(xs, vals);
    poly.resize(xs.size(), GaussianRational{});
    rowsByH.push_back(std::move(poly));
  }
  UniPolyOverH<GaussianRational> out;
  out.coeffs.resize(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::vector<GaussianRational> vals;
    for (const auto& row : rowsByH) vals.push_back(row[i]);
    out.coeffs[i] = interpolateExact(hs, vals);
  }
  return out;
}

UniPolyOverH<Complex> interpolateResultant(const HBivarPoly<Complex>& p, const HBivarPoly<Complex>& q,
                                           Bounds b) {
  const int dp = p.degreeY();
  const int dq = q.degreeY();
  const int lx = b.xDegree + 1;
  const int lh = b.hDegree + 1;
  std::vector<std::vector<Complex>> vals(lh, std::vector<Complex>(lx));
  for (int a = 0; a < lh; ++a) {
    const Complex h = std::polar(1.0, 2.0 * kPi * a / lh);
    for (int c = 0; c < lx; ++c) {
      const Complex x = std::polar(1.0, 2.0 * kPi * c / lx);
      vals[a][c] = resultantOf(p.yCoefficientsAt(h, x, dp), q.yCoefficientsAt(h, x, dq));
    }
  }
  UniPolyOverH<Complex> out;
  out.coeffs.assign(lx, DensePoly<Complex>(lh, 0.0));
  for (int i = 0; i < lx; ++i)
    for (int k = 0; k < lh; ++k) {
      Complex acc = 0.0;
      for (int a = 0; a < lh; ++a)
        for (int c = 0; c < lx; ++c)
          acc += vals[a][c] * std::polar(1.0, -2.0 * kPi * (static_cast<double>(k) * a / lh +
                                                          static_cast<double>(i) * c / lx));
      out.coeffs[i][k] = acc / static_cast<double>(lx * lh);
    }
  return out;
}

}  // namespace

template <Field S>
UniPolyOverH<S> resultantInY(const HBivarPoly<S>& p, const HBivarPoly<S>& q) {
  if (p.isZero() || q.isZero()) throw DegenerateResultant("argument is identically zero");
  return trimUni(interpolateResultant(p, q, resultantBounds(p, q)));
}

template <Field S>
UniPolyOverH<S> discriminantInY(const HBivarPoly<S>& p) {
  const int d = p.degreeY();
  if (p.isZero()) throw DegenerateResultant("argument is identically zero");
  if (d < 2) throw PreconditionViolated("discriminant needs degree in y >= 2");
  bool dependsOnH = false;
  const DensePoly<S> lead = p.yCoefficientInX(d, dependsOnH);
  if (dependsOnH) throw PreconditionViolated("leading y-coefficient depends on h");
  UniPolyOverH<S> res = resultantInY(p, p.derivativeY());
  int hDeg = 0;
  for (const auto& c : res.coeffs) hDeg = std::max(hDeg, static_cast<int>(c.size()));
  UniPolyOverH<S> out;
  const bool negate = ((d * (d - 1)) / 2) % 2 == 1;
  for (int k = 0; k < hDeg; ++k) {
    DensePoly<S> inX;
    for (const auto& c : res.coeffs) inX.push_back(k < static_cast<int>(c.size()) ? c[k] : ScalarTraits<S>::zero());
    const DensePoly<S> quot = divideDense(inX, lead);
    if (out.coeffs.size() < quot.size()) out.coeffs.resize(quot.size());
    for (std::size_t i = 0; i < quot.size(); ++i) {
      auto& slot = out.coeffs[i];
      slot.resize(hDeg, ScalarTraits<S>::zero());
      slot[k] = negate ? -quot[i] : quot[i];
    }
  }
  return trimUni(std::move(out));
}

Complex discriminantAt(const HBivarPoly<Complex>& p, Complex h, Complex x) {
  const int d = p.degreeY();
  if (d < 2) throw PreconditionViolated("discriminant needs degree in y >= 2");
  const auto coeffs = p.yCoefficientsAt(h, x, d);
  const auto deriv = p.derivativeY().yCoefficientsAt(h, x, d - 1);
  const Complex res = resultantOf(coeffs, deriv);
  const bool negate = ((d * (d - 1)) / 2) % 2 == 1;
  return (negate ? -res : res) / coeffs[d];
}

template <Field S>
int genericXDegree(const UniPolyOverH<S>& d) {
  for (int k = static_cast<int>(d.coeffs.size()) - 1; k >= 0; --k)
    if (effectiveDegree(d.coeffs[k]) >= 0) return k;
  return -1;
}

template <Field S>
int degreeDropAt(const UniPolyOverH<S>& d, const S& h0) {
  if (d.isZero()) throw PreconditionViolated("zero discriminant");
  const int generic = genericXDegree(d);
  const DensePoly<S> at = d.atH(h0);
  double scale = 0.0;
  for (const auto& c : at) scale = std::max(scale, ScalarTraits<S>::magnitude(c));
  const int special = effectiveDegree(at, scale);
  return generic - special;
}

template UniPolyOverH<Complex> resultantInY(const HBivarPoly<Complex>&, const HBivarPoly<Complex>&);
template UniPolyOverH<GaussianRational> resultantInY(const HBivarPoly<GaussianRational>&,
                                                     const HBivarPoly<GaussianRational>&);
template UniPolyOverH<Complex> discriminantInY(const HBivarPoly<Complex>&);
template UniPolyOverH<GaussianRational> discriminantInY(const HBivarPoly<GaussianRational>&);
template int degreeDropAt(const UniPolyOverH<Complex>&, const Complex&);
template int degreeDropAt(const UniPolyOverH<GaussianRational>&, const GaussianRational&);
template int genericXDegree(const UniPolyOverH<Complex>&);
template int genericXDegree(const UniPolyOverH<GaussianRational>&);

}  // namespace isochron
