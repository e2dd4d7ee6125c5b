#include "isochron/univariate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace isochron {

namespace {

// Horner for p and p' together.
void evalWithDerivative(const DensePoly<Complex>& p, Complex z, Complex& value, Complex& deriv) {
  value = 0.0;
  deriv = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) {
    deriv = deriv * z + value;
    value = value * z + *it;
  }
}

// Error-bound scale for |p(z)|: sum |c_k| |z|^k.
double absoluteScale(const DensePoly<Complex>& p, double r) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * r + std::abs(*it);
  return acc;
}

}  // namespace

std::vector<Complex> aberthRoots(const DensePoly<Complex>& cIn, int maxIterations) {
  DensePoly<Complex> c = trimmed(cIn);
  if (c.empty()) throw ZeroPolynomial("all coefficients vanish");
  std::vector<Complex> roots;
  // Zero roots are exact; strip them so the iteration only sees nonzero roots.
  std::size_t zeros = 0;
  double scale = 0.0;
  for (const auto& v : c) scale = std::max(scale, std::abs(v));
  while (zeros < c.size() - 1 && c[zeros] == Complex{}) ++zeros;
  roots.assign(zeros, Complex{0.0, 0.0});
  c.erase(c.begin(), c.begin() + static_cast<long>(zeros));
  const int n = static_cast<int>(c.size()) - 1;
  if (n <= 0) return roots;
  if (n == 1) {
    roots.push_back(-c[0] / c[1]);
    return roots;
  }

  // Initial guesses on a circle whose radius is the geometric-mean root modulus.
  const double radius = std::pow(std::abs(c[0]) / std::abs(c[n]), 1.0 / n);
  std::vector<Complex> z(n);
  for (int k = 0; k < n; ++k) z[k] = std::polar(radius, 2.0 * kPi * k / n + 0.4);

  std::vector<bool> done(n, false);
  for (int iter = 0; iter < maxIterations; ++iter) {
    bool allDone = true;
    for (int k = 0; k < n; ++k) {
      if (done[k]) continue;
      Complex v, d;
      evalWithDerivative(c, z[k], v, d);
      if (std::abs(v) <= 4.0 * 2.2e-16 * absoluteScale(c, std::abs(z[k]))) {
        done[k] = true;
        continue;
      }
      const Complex ratio = v / d;
      Complex sum = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      const Complex step = ratio / (1.0 - ratio * sum);
      z[k] -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z[k])))
        done[k] = true;
      else
        allDone = false;
    }
    if (allDone) break;
  }

  // Newton polish, accepted only when it lowers the residual.
  for (auto& r : z) {
    for (int it = 0; it < 5; ++it) {
      Complex v, d;
      evalWithDerivative(c, r, v, d);
      if (d == Complex{0.0, 0.0}) break;
      const Complex cand = r - v / d;
      Complex v2, d2;
      evalWithDerivative(c, cand, v2, d2);
      if (std::abs(v2) < std::abs(v))
        r = cand;
      else
        break;
    }
  }
  roots.insert(roots.end(), z.begin(), z.end());
  return roots;
}

std::vector<Root> univariateRoots(const DensePoly<Complex>& c, const RootOptions& opts) {
  const std::vector<Complex> raw = aberthRoots(c, opts.maxIterations);
  const int n = static_cast<int>(raw.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double r = opts.clusterRadius * std::max(1.0, std::max(std::abs(raw[i]), std::abs(raw[j])));
      if (std::abs(raw[i] - raw[j]) <= r) parent[find(i)] = find(j);
    }
  std::vector<Root> out;
  std::vector<int> slot(n, -1);
  std::vector<Complex> sums;
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(out.size());
      out.push_back({0.0, 0});
      sums.push_back(0.0);
    }
    out[slot[r]].multiplicity += 1;
    sums[slot[r]] += raw[i];
  }
  for (std::size_t k = 0; k < out.size(); ++k) out[k].value = sums[k] / static_cast<double>(out[k].multiplicity);
  return out;
}

DensePoly<Complex> fromRoots(const std::vector<Root>& roots) {
  DensePoly<Complex> p{1.0};
  for (const auto& r : roots)
    for (int k = 0; k < r.multiplicity; ++k) p = multiplyDense<Complex>(p, {-r.value, 1.0});
  return p;
}

}  // namespace isochron
