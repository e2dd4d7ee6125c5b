#ifndef ISOCHRON_HAMILTONIAN_HPP
#define ISOCHRON_HAMILTONIAN_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "isochron/bivar_poly.hpp"
#include "isochron/errors.hpp"

namespace isochron {

/// H = xy + sum_j a_j x^(n+1-j) y^j, with a = (a_0, ..., a_{n+1}).
template <Field S>
struct HomogeneousHamiltonianSystem {
  int n = 2;
  std::vector<S> a;

  HomogeneousHamiltonianSystem() : a(4, ScalarTraits<S>::zero()) {}
  HomogeneousHamiltonianSystem(int degree, std::vector<S> coeffs) : n(degree), a(std::move(coeffs)) {
    if (n < 2) throw PreconditionViolated("system degree must be >= 2");
    if (static_cast<int>(a.size()) != n + 2)
      throw LengthMismatch("expected " + std::to_string(n + 2) + " coefficients, got " + std::to_string(a.size()));
  }

  bool nonzero(int j) const { return !isExactlyZero(a[j]); }

  /// Top homogeneous part H_{n+1}.
  BivarPoly<S> top() const {
    BivarPoly<S> p;
    for (int j = 0; j <= n + 1; ++j) p.add(n + 1 - j, j, a[j]);
    return p;
  }

  template <Field T>
  HomogeneousHamiltonianSystem<T> cast() const {
    std::vector<T> out;
    for (const auto& c : a) out.push_back(ScalarTraits<T>::fromComplex(ScalarTraits<S>::toComplex(c)));
    return {n, std::move(out)};
  }
};

using SystemC = HomogeneousHamiltonianSystem<Complex>;
using SystemQ = HomogeneousHamiltonianSystem<GaussianRational>;

template <Field S>
BivarPoly<S> buildH(const HomogeneousHamiltonianSystem<S>& sys) {
  if (static_cast<int>(sys.a.size()) != sys.n + 2) throw LengthMismatch("coefficient count != n+2");
  return BivarPoly<S>::monomial(1, 1) + sys.top();
}

/// (H_y, -H_x) at (x, y).
template <Field S>
std::pair<Complex, Complex> vectorField(const HomogeneousHamiltonianSystem<S>& sys, Complex x, Complex y) {
  const auto h = buildH(sys).template cast<Complex>();
  return {h.derivative(Variable::Y).eval(x, y), -h.derivative(Variable::X).eval(x, y)};
}

enum class Verdict { IsochronousConditionI, IsochronousConditionII, IsochronousBoth, NotIsochronous };

std::string verdictName(Verdict v);

struct IsochronicityVerdict {
  Verdict verdict = Verdict::NotIsochronous;
  std::optional<std::pair<int, int>> witnessPair;
  std::optional<int> resonantIndex;
};

template <Field S>
bool conditionI(const HomogeneousHamiltonianSystem<S>& sys) {
  for (int j = 0; 2 * j <= sys.n + 1; ++j)
    if (sys.nonzero(j)) return false;
  return true;
}

template <Field S>
bool conditionII(const HomogeneousHamiltonianSystem<S>& sys) {
  for (int j = sys.n + 1; 2 * j >= sys.n + 1; --j)
    if (sys.nonzero(j)) return false;
  return true;
}

template <Field S>
bool resonanceObstruction(const HomogeneousHamiltonianSystem<S>& sys) {
  return sys.n % 2 == 1 && sys.nonzero((sys.n + 1) / 2);
}

template <Field S>
bool nonIsolatedLocus(const HomogeneousHamiltonianSystem<S>& sys) {
  if (sys.n % 2 == 0) return false;
  const int mid = (sys.n + 1) / 2;
  for (int j = 0; j <= sys.n + 1; ++j)
    if (sys.nonzero(j) != (j == mid)) return false;
  return true;
}

template <Field S>
IsochronicityVerdict classifyIsochronicity(const HomogeneousHamiltonianSystem<S>& sys) {
  const bool one = conditionI(sys);
  const bool two = conditionII(sys);
  IsochronicityVerdict v;
  if (one && two) v.verdict = Verdict::IsochronousBoth;
  else if (one) v.verdict = Verdict::IsochronousConditionI;
  else if (two) v.verdict = Verdict::IsochronousConditionII;
  if (one || two) return v;
  if (resonanceObstruction(sys)) {
    v.resonantIndex = (sys.n + 1) / 2;
    return v;
  }
  int j = 0;
  while (!(2 * j < sys.n + 1 && sys.nonzero(j))) ++j;
  int k = sys.n + 1;
  while (!(2 * k > sys.n + 1 && sys.nonzero(k))) --k;
  v.witnessPair = {j, k};
  return v;
}

/// Exponents p(n+1-j)+q(j-1)-p and p(n-j)+qj-q with p = 1, q = -1.
template <Field S>
std::vector<int> admissibilityExponents(const HomogeneousHamiltonianSystem<S>& sys) {
  const int p = 1, q = -1, n = sys.n;
  std::vector<int> out;
  for (int j = 0; j <= n + 1; ++j) {
    if (!sys.nonzero(j)) continue;
    if (j < n + 1) out.push_back(p * (n + 1 - j) + q * (j - 1) - p);
    if (j > 0) out.push_back(p * (n - j) + q * j - q);
  }
  return out;
}

template <Field S>
bool admissibleNonlinearities(const HomogeneousHamiltonianSystem<S>& sys) {
  bool pos = false, neg = false;
  for (int e : admissibilityExponents(sys)) {
    if (e == 0) return false;
    (e > 0 ? pos : neg) = true;
  }
  return !(pos && neg);
}

struct CriticalPoint {
  Complex x;
  Complex y;
  Complex value;
  int hessianRank = 0;
  int milnorNumber = 1;
  int akType = 1;
  bool isolated = true;
};

/// Solutions of H_x = H_y = 0. Points whose Newton polish fails are dropped and reported in warnings.
std::vector<CriticalPoint> finiteCriticalPoints(const SystemC& sys, std::vector<std::string>* warnings = nullptr);
std::vector<CriticalPoint> finiteCriticalPoints(const SystemQ& sys, std::vector<std::string>* warnings = nullptr);

/// Critical points on L_0 besides the origin.
template <Field S>
std::vector<CriticalPoint> l0ExtraCriticalPoints(const HomogeneousHamiltonianSystem<S>& sys);

/// Critical values together with the values where the discriminant loses x-degree.
std::vector<Complex> atypicalValues(const SystemC& sys);
std::vector<Complex> atypicalValues(const SystemQ& sys);

int hessianRankAt(const BivarPolyC& h, Complex x, Complex y);

}  // namespace isochron

#endif  // ISOCHRON_HAMILTONIAN_HPP
