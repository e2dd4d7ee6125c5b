#ifndef ISOCHRON_SCALAR_HPP
#define ISOCHRON_SCALAR_HPP

#include <cmath>
#include <complex>
#include <concepts>

#include "isochron/gaussian_rational.hpp"

namespace isochron {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline const Complex kTwoPiI{0.0, 2.0 * kPi};

/// Relative threshold below which a floating coefficient counts as zero.
inline constexpr double kZeroThreshold = 1e-10;

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<Complex> {
  static constexpr bool kExact = false;
  static Complex zero() { return {0.0, 0.0}; }
  static Complex one() { return {1.0, 0.0}; }
  static Complex fromInt(long v) { return {static_cast<double>(v), 0.0}; }
  static Complex fromComplex(Complex z) { return z; }
  static Complex toComplex(const Complex& z) { return z; }
  static double magnitude(const Complex& z) { return std::abs(z); }
  /// `scale` is the largest magnitude among the values the decision is relative to.
  static bool isZero(const Complex& z, double scale) { return std::abs(z) <= kZeroThreshold * scale; }
};

template <>
struct ScalarTraits<GaussianRational> {
  static constexpr bool kExact = true;
  static GaussianRational zero() { return {}; }
  static GaussianRational one() { return GaussianRational(1); }
  static GaussianRational fromInt(long v) { return GaussianRational(v); }
  static GaussianRational fromComplex(Complex z) { return GaussianRational::fromComplex(z); }
  static Complex toComplex(const GaussianRational& z) { return z.toComplex(); }
  static double magnitude(const GaussianRational& z) { return std::abs(z.toComplex()); }
  static bool isZero(const GaussianRational& z, double /*scale*/) { return z.isZero(); }
};

template <class S>
concept Field = requires { ScalarTraits<S>::kExact; };

/// Exact zero test for exact fields; for floating values a plain `== 0`.
template <Field S>
bool isExactlyZero(const S& s) {
  if constexpr (ScalarTraits<S>::kExact) {
    return s.isZero();
  } else {
    return s == S{};
  }
}

}  // namespace isochron

#endif  // ISOCHRON_SCALAR_HPP
