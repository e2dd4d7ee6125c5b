#ifndef ISOCHRON_UNIVARIATE_HPP
#define ISOCHRON_UNIVARIATE_HPP

#include <vector>

#include "isochron/errors.hpp"
#include "isochron/scalar.hpp"

namespace isochron {

/// Dense univariate polynomial, coefficient of z^k at index k.
template <Field S>
using DensePoly = std::vector<S>;

/// Drops trailing zero coefficients (exact zeros for exact S, relative threshold otherwise).
template <Field S>
DensePoly<S> trimmed(DensePoly<S> p) {
  double scale = 0.0;
  for (const auto& c : p) scale = std::max(scale, ScalarTraits<S>::magnitude(c));
  while (!p.empty() && ScalarTraits<S>::isZero(p.back(), scale)) p.pop_back();
  return p;
}

/// Index of the highest coefficient that is not zero; -1 for the zero polynomial.
template <Field S>
int effectiveDegree(const DensePoly<S>& p, double scale = -1.0) {
  if (scale < 0.0) {
    scale = 0.0;
    for (const auto& c : p) scale = std::max(scale, ScalarTraits<S>::magnitude(c));
  }
  for (int k = static_cast<int>(p.size()) - 1; k >= 0; --k)
    if (!ScalarTraits<S>::isZero(p[k], scale)) return k;
  return -1;
}

template <Field S, class T>
T evalDense(const DensePoly<S>& p, const T& z) {
  T acc{};
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    if constexpr (std::is_same_v<S, T>)
      acc = acc * z + *it;
    else
      acc = acc * z + T(ScalarTraits<S>::toComplex(*it));
  }
  return acc;
}

template <Field S>
DensePoly<S> derivativeDense(const DensePoly<S>& p) {
  DensePoly<S> out;
  for (std::size_t k = 1; k < p.size(); ++k) out.push_back(p[k] * ScalarTraits<S>::fromInt(static_cast<long>(k)));
  return out;
}

template <Field S>
DensePoly<S> multiplyDense(const DensePoly<S>& a, const DensePoly<S>& b) {
  if (a.empty() || b.empty()) return {};
  DensePoly<S> out(a.size() + b.size() - 1, ScalarTraits<S>::zero());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

/// Quotient of a by b. Exact fields require a zero remainder.
template <Field S>
DensePoly<S> divideDense(DensePoly<S> a, const DensePoly<S>& bIn) {
  const DensePoly<S> b = trimmed(bIn);
  if (b.empty()) throw ZeroPolynomial("division by the zero polynomial");
  a = trimmed(std::move(a));
  if (a.size() < b.size()) {
    if constexpr (ScalarTraits<S>::kExact)
      if (!a.empty()) throw PreconditionViolated("inexact polynomial division");
    return {};
  }
  DensePoly<S> q(a.size() - b.size() + 1, ScalarTraits<S>::zero());
  for (int k = static_cast<int>(q.size()) - 1; k >= 0; --k) {
    q[k] = a[k + b.size() - 1] / b.back();
    for (std::size_t j = 0; j < b.size(); ++j) a[k + j] -= q[k] * b[j];
  }
  if constexpr (ScalarTraits<S>::kExact) {
    for (std::size_t j = 0; j + 1 < b.size(); ++j)
      if (!a[j].isZero()) throw PreconditionViolated("inexact polynomial division");
  }
  return q;
}

struct Root {
  Complex value;
  int multiplicity = 1;
};

struct RootOptions {
  double clusterRadius = 1e-7;
  int maxIterations = 1000;
};

/// All complex roots of c[0] + c[1] z + ... (Aberth-Ehrlich iteration, Newton polish,
/// multiplicities by clustering). Multiplicities sum to the trimmed degree.
std::vector<Root> univariateRoots(const DensePoly<Complex>& c, const RootOptions& opts = {});

/// Roots listed with repetition, unclustered.
std::vector<Complex> aberthRoots(const DensePoly<Complex>& c, int maxIterations = 1000);

/// Monic polynomial with the given roots (repeated by multiplicity).
DensePoly<Complex> fromRoots(const std::vector<Root>& roots);

}  // namespace isochron

#endif  // ISOCHRON_UNIVARIATE_HPP
