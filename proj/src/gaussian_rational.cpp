#include "isochron/gaussian_rational.hpp"

#include "isochron/errors.hpp"

namespace isochron {

namespace {

mpq_class parseRational(const std::string& s) {
  mpq_class q;
  if (s.empty() || q.set_str(s, 10) != 0) throw ParseError("not a rational number: '" + s + "'");
  if (q.get_den() == 0) throw ParseError("zero denominator: '" + s + "'");
  q.canonicalize();
  return q;
}

}  // namespace

GaussianRational GaussianRational::parse(const std::string& re, const std::string& im) {
  return {parseRational(re), parseRational(im)};
}

GaussianRational& GaussianRational::operator/=(const GaussianRational& o) {
  const mpq_class n = o.norm();
  if (sgn(n) == 0) throw std::domain_error("GaussianRational division by zero");
  mpq_class r = (re_ * o.re_ + im_ * o.im_) / n;
  mpq_class i = (im_ * o.re_ - re_ * o.im_) / n;
  re_ = std::move(r);
  im_ = std::move(i);
  return *this;
}

std::string GaussianRational::str() const {
  if (sgn(im_) == 0) return re_.get_str();
  return re_.get_str() + (sgn(im_) < 0 ? "-" : "+") + mpq_class(abs(im_)).get_str() + "i";
}

}  // namespace isochron
