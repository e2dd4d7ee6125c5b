#include "isochron/hamiltonian.hpp"

#include <Eigen/Dense>

#include "isochron/resultant.hpp"
#include "isochron/univariate.hpp"

namespace isochron {

std::string verdictName(Verdict v) {
  switch (v) {
    case Verdict::IsochronousConditionI: return "IsochronousConditionI";
    case Verdict::IsochronousConditionII: return "IsochronousConditionII";
    case Verdict::IsochronousBoth: return "IsochronousBoth";
    case Verdict::NotIsochronous: return "NotIsochronous";
  }
  return "?";
}

namespace {

// Shear (x, y) = (u + kC1 v, kC2 u + v) separating critical points by their u-coordinate.
constexpr long kC1Num = 3, kC1Den = 7, kC2Num = -2, kC2Den = 5;

template <Field S>
S ratio(long p, long q) {
  return ScalarTraits<S>::fromInt(p) / ScalarTraits<S>::fromInt(q);
}

Eigen::Matrix2cd hessian(const BivarPolyC& hxx, const BivarPolyC& hxy, const BivarPolyC& hyy, Complex x, Complex y) {
  Eigen::Matrix2cd m;
  m << hxx.eval(x, y), hxy.eval(x, y), hxy.eval(x, y), hyy.eval(x, y);
  return m;
}

struct Derivs {
  BivarPolyC hx, hy, hxx, hxy, hyy;
  explicit Derivs(const BivarPolyC& h)
      : hx(h.derivative(Variable::X)),
        hy(h.derivative(Variable::Y)),
        hxx(hx.derivative(Variable::X)),
        hxy(hx.derivative(Variable::Y)),
        hyy(hy.derivative(Variable::Y)) {}
};

int rankOf(const Eigen::Matrix2cd& m) {
  const Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m);
  const auto s = svd.singularValues();
  const double tol = 1e-8 * std::max(1.0, s(0));
  return (s(0) > tol) + (s(1) > tol);
}

// Newton on (H_x, H_y); least-squares steps through singular Hessians.
bool polish(const Derivs& d, Complex& x, Complex& y) {
  for (int it = 0; it < 50; ++it) {
    Eigen::Vector2cd f(d.hx.eval(x, y), d.hy.eval(x, y));
    const Eigen::Vector2cd step = hessian(d.hxx, d.hxy, d.hyy, x, y).completeOrthogonalDecomposition().solve(f);
    if (!step.allFinite()) return false;
    x -= step(0);
    y -= step(1);
    if (step.norm() < 1e-13 * std::max(1.0, std::abs(x) + std::abs(y))) break;
  }
  return std::abs(d.hx.eval(x, y)) + std::abs(d.hy.eval(x, y)) < 1e-10 * std::max(1.0, std::abs(x) + std::abs(y));
}

template <Field S>
std::vector<CriticalPoint> criticalPointsImpl(const HomogeneousHamiltonianSystem<S>& sys,
                                              std::vector<std::string>* warnings) {
  const BivarPoly<S> h = buildH(sys);
  const S c1 = ratio<S>(kC1Num, kC1Den), c2 = ratio<S>(kC2Num, kC2Den);
  const BivarPoly<S> g = h.substituteLinear(ScalarTraits<S>::one(), c1, c2, ScalarTraits<S>::one());
  const BivarPoly<S> gu = g.derivative(Variable::X), gv = g.derivative(Variable::Y);
  const auto res = resultantInY(HBivarPoly<S>(gu), HBivarPoly<S>(gv));
  DensePoly<Complex> ru;
  for (const auto& c : res.coeffs) ru.push_back(c.empty() ? Complex{} : ScalarTraits<S>::toComplex(c[0]));
  if (effectiveDegree(ru) < 0) throw NonIsolatedSingularities("eliminating resultant vanishes identically");

  const BivarPolyC hc = h.template cast<Complex>();
  const Derivs d(hc);
  const BivarPolyC guc = gu.template cast<Complex>(), gvc = gv.template cast<Complex>();
  const Complex c1c = ScalarTraits<S>::toComplex(c1), c2c = ScalarTraits<S>::toComplex(c2);

  std::vector<CriticalPoint> out;
  for (const auto& root : univariateRoots(ru, {1e-6, 1000})) {
    const Complex u = root.value;
    auto coeffs = gvc.yCoefficientsAt(u);
    if (effectiveDegree(coeffs) < 1) coeffs = guc.yCoefficientsAt(u);
    Complex bestV{};
    double best = 1e300;
    for (const Complex v : aberthRoots(coeffs)) {
      const double r = std::abs(guc.eval(u, v)) + std::abs(gvc.eval(u, v));
      if (r < best) best = r, bestV = v;
    }
    Complex x = u + c1c * bestV, y = c2c * u + bestV;
    if (!polish(d, x, y)) {
      if (warnings) warnings->push_back("Newton polish failed near (" + std::to_string(x.real()) + "," +
                                        std::to_string(x.imag()) + "i, " + std::to_string(y.real()) + "," +
                                        std::to_string(y.imag()) + "i)");
      continue;
    }
    bool merged = false;
    for (auto& p : out)
      if (std::abs(p.x - x) + std::abs(p.y - y) < 1e-6 * std::max(1.0, std::abs(x) + std::abs(y))) {
        p.milnorNumber += root.multiplicity;
        merged = true;
        break;
      }
    if (merged) continue;
    CriticalPoint cp;
    cp.x = x;
    cp.y = y;
    cp.value = hc.eval(x, y);
    cp.milnorNumber = root.multiplicity;
    out.push_back(cp);
  }
  for (auto& p : out) {
    p.hessianRank = rankOf(hessian(d.hxx, d.hxy, d.hyy, p.x, p.y));
    if (p.hessianRank == 2) p.milnorNumber = 1;
    p.akType = p.hessianRank >= 1 ? p.milnorNumber : 0;
    if (std::abs(p.x) + std::abs(p.y) < 1e-12) p.x = p.y = p.value = 0.0;
  }
  return out;
}

template <Field S>
std::vector<Complex> atypicalImpl(const HomogeneousHamiltonianSystem<S>& sys) {
  std::vector<Complex> vals;
  auto insert = [&vals](Complex v) {
    for (const auto& w : vals)
      if (std::abs(w - v) < 1e-9) return;
    vals.push_back(v);
  };
  for (const auto& p : criticalPointsImpl(sys, nullptr)) insert(p.value);
  const auto level = HBivarPoly<S>::levelSet(buildH(sys));
  if (level.degreeY() >= 2) {
    const auto disc = discriminantInY(level);
    const int g = genericXDegree(disc);
    DensePoly<Complex> lead;
    for (const auto& c : disc.coeffs[g]) lead.push_back(ScalarTraits<S>::toComplex(c));
    if (effectiveDegree(lead) >= 1)
      for (const auto& r : univariateRoots(lead)) insert(r.value);
  }
  return vals;
}

}  // namespace

int hessianRankAt(const BivarPolyC& h, Complex x, Complex y) {
  const Derivs d(h);
  return rankOf(hessian(d.hxx, d.hxy, d.hyy, x, y));
}

std::vector<CriticalPoint> finiteCriticalPoints(const SystemC& sys, std::vector<std::string>* warnings) {
  return criticalPointsImpl(sys, warnings);
}
std::vector<CriticalPoint> finiteCriticalPoints(const SystemQ& sys, std::vector<std::string>* warnings) {
  return criticalPointsImpl(sys, warnings);
}

std::vector<Complex> atypicalValues(const SystemC& sys) { return atypicalImpl(sys); }
std::vector<Complex> atypicalValues(const SystemQ& sys) { return atypicalImpl(sys); }

template <Field S>
std::vector<CriticalPoint> l0ExtraCriticalPoints(const HomogeneousHamiltonianSystem<S>& sys) {
  const int n = sys.n;
  const BivarPolyC hc = buildH(sys).template cast<Complex>();
  std::vector<CriticalPoint> out;
  // Roots of 1 + c t^(n-1), placed on the x-axis or the y-axis.
  auto addRoots = [&](const S& c, bool onX) {
    const Complex base = std::pow(-1.0 / ScalarTraits<S>::toComplex(c), 1.0 / (n - 1));
    for (int k = 0; k < n - 1; ++k) {
      const Complex t = base * std::polar(1.0, 2.0 * kPi * k / (n - 1));
      CriticalPoint p;
      p.x = onX ? t : Complex{};
      p.y = onX ? Complex{} : t;
      p.value = hc.eval(p.x, p.y);
      p.hessianRank = hessianRankAt(hc, p.x, p.y);
      p.milnorNumber = 1;
      p.akType = p.hessianRank == 2 ? 1 : 0;
      out.push_back(p);
    }
  };
  if (!sys.nonzero(0) && sys.nonzero(1)) addRoots(sys.a[1], true);
  if (!sys.nonzero(n + 1) && sys.nonzero(n)) addRoots(sys.a[n], false);
  return out;
}

template std::vector<CriticalPoint> l0ExtraCriticalPoints(const SystemC&);
template std::vector<CriticalPoint> l0ExtraCriticalPoints(const SystemQ&);

}  // namespace isochron
