#ifndef ISOCHRON_GAUSSIAN_RATIONAL_HPP
#define ISOCHRON_GAUSSIAN_RATIONAL_HPP

#include <complex>
#include <ostream>
#include <string>

#include <gmpxx.h>

#include <Eigen/Core>

namespace isochron {

/// Exact element of Q(i): re + i*im with arbitrary-precision rational parts.
class GaussianRational {
 public:
  GaussianRational() : re_(0), im_(0) {}
  GaussianRational(long v) : re_(v), im_(0) {}  // NOLINT(implicit)
  GaussianRational(int v) : re_(v), im_(0) {}   // NOLINT(implicit)
  GaussianRational(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {
    re_.canonicalize();
    im_.canonicalize();
  }

  /// Exact conversion: every finite double is a dyadic rational.
  static GaussianRational fromComplex(std::complex<double> z) {
    return GaussianRational(mpq_class(z.real()), mpq_class(z.imag()));
  }

  /// Parses "p/q" or "p" for each component.
  static GaussianRational parse(const std::string& re, const std::string& im = "0");

  const mpq_class& re() const { return re_; }
  const mpq_class& im() const { return im_; }

  bool isZero() const { return sgn(re_) == 0 && sgn(im_) == 0; }
  std::complex<double> toComplex() const { return {re_.get_d(), im_.get_d()}; }
  std::string str() const;

  GaussianRational conj() const { return {re_, -im_}; }
  mpq_class norm() const { return re_ * re_ + im_ * im_; }

  GaussianRational& operator+=(const GaussianRational& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  GaussianRational& operator-=(const GaussianRational& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  GaussianRational& operator*=(const GaussianRational& o) {
    mpq_class r = re_ * o.re_ - im_ * o.im_;
    mpq_class i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }
  GaussianRational& operator/=(const GaussianRational& o);

  friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
  friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
  friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
  friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
  friend GaussianRational operator-(const GaussianRational& a) { return {-a.re_, -a.im_}; }

  friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }
  friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const GaussianRational& z) { return os << z.str(); }

 private:
  mpq_class re_;
  mpq_class im_;
};

}  // namespace isochron

namespace Eigen {

template <>
struct NumTraits<isochron::GaussianRational> : GenericNumTraits<isochron::GaussianRational> {
  using Real = isochron::GaussianRational;
  using NonInteger = isochron::GaussianRational;
  using Nested = isochron::GaussianRational;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 10,
    AddCost = 40,
    MulCost = 120
  };
  static inline Real epsilon() { return Real(0); }
  static inline Real dummy_precision() { return Real(0); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen

#endif  // ISOCHRON_GAUSSIAN_RATIONAL_HPP
