#ifndef ISOCHRON_BIVAR_POLY_HPP
#define ISOCHRON_BIVAR_POLY_HPP

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "isochron/scalar.hpp"

namespace isochron {

enum class Variable { X, Y };

/// Exponent pair (power of x, power of y).
using Exponent = std::pair<int, int>;

/// Sparse polynomial in (x, y) over the field S. Zero coefficients are never stored.
template <Field S>
class BivarPoly {
 public:
  using Scalar = S;
  using Terms = std::map<Exponent, S>;

  BivarPoly() = default;

  static BivarPoly constant(const S& c) {
    BivarPoly p;
    p.add(0, 0, c);
    return p;
  }
  static BivarPoly monomial(int i, int j, const S& c = ScalarTraits<S>::one()) {
    BivarPoly p;
    p.add(i, j, c);
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool isZero() const { return terms_.empty(); }

  /// Adds c*x^i*y^j, dropping the term if it cancels exactly.
  void add(int i, int j, const S& c) {
    if (isExactlyZero(c)) return;
    auto [it, inserted] = terms_.try_emplace({i, j}, c);
    if (!inserted) {
      it->second += c;
      if (isExactlyZero(it->second)) terms_.erase(it);
    }
  }

  S coeff(int i, int j) const {
    auto it = terms_.find({i, j});
    return it == terms_.end() ? ScalarTraits<S>::zero() : it->second;
  }

  /// Total degree; -1 for the zero polynomial.
  int degree() const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, e.first + e.second);
    return d;
  }

  int degreeIn(Variable v) const {
    int d = -1;
    for (const auto& [e, c] : terms_) d = std::max(d, v == Variable::X ? e.first : e.second);
    return d;
  }

  BivarPoly homogeneousPart(int d) const {
    BivarPoly out;
    for (const auto& [e, c] : terms_)
      if (e.first + e.second == d) out.terms_.emplace(e, c);
    return out;
  }

  /// Largest coefficient magnitude; used as the scale for floating zero tests.
  double maxMagnitude() const {
    double m = 0.0;
    for (const auto& [e, c] : terms_) m = std::max(m, ScalarTraits<S>::magnitude(c));
    return m;
  }

  template <class T>
  T eval(const T& x, const T& y) const {
    // Horner in x inside each y-power, then Horner in y.
    const int dy = degreeIn(Variable::Y);
    if (dy < 0) return T{};
    std::vector<std::vector<std::pair<int, const S*>>> rows(dy + 1);
    for (const auto& [e, c] : terms_) rows[e.second].push_back({e.first, &c});
    T acc{};
    for (int j = dy; j >= 0; --j) {
      T row{};
      int cur = -1;
      for (auto it = rows[j].rbegin(); it != rows[j].rend(); ++it) {
        if (cur >= 0)
          for (int k = it->first; k < cur; ++k) row *= x;
        row += toT<T>(*it->second);
        cur = it->first;
      }
      if (cur > 0)
        for (int k = 0; k < cur; ++k) row *= x;
      acc = acc * y + row;
    }
    return acc;
  }

  S operator()(const S& x, const S& y) const { return eval<S>(x, y); }

  BivarPoly derivative(Variable v) const {
    BivarPoly out;
    for (const auto& [e, c] : terms_) {
      const int p = v == Variable::X ? e.first : e.second;
      if (p == 0) continue;
      Exponent ne = v == Variable::X ? Exponent{e.first - 1, e.second} : Exponent{e.first, e.second - 1};
      out.add(ne.first, ne.second, c * ScalarTraits<S>::fromInt(p));
    }
    return out;
  }

  /// Coefficients of powers of y after fixing x, lowest first.
  std::vector<S> yCoefficientsAt(const S& x) const {
    std::vector<S> out(std::max(0, degreeIn(Variable::Y) + 1), ScalarTraits<S>::zero());
    for (const auto& [e, c] : terms_) {
      S t = c;
      for (int k = 0; k < e.first; ++k) t *= x;
      out[e.second] += t;
    }
    return out;
  }

  /// Polynomial in x multiplying y^j.
  std::vector<S> xPolynomialOfYPower(int j) const {
    std::vector<S> out;
    for (const auto& [e, c] : terms_) {
      if (e.second != j) continue;
      if (static_cast<int>(out.size()) <= e.first) out.resize(e.first + 1, ScalarTraits<S>::zero());
      out[e.first] += c;
    }
    return out;
  }

  BivarPoly swapped() const {
    BivarPoly out;
    for (const auto& [e, c] : terms_) out.terms_.emplace(Exponent{e.second, e.first}, c);
    return out;
  }

  /// p(m00*u + m01*v, m10*u + m11*v) as a polynomial in (u, v).
  BivarPoly substituteLinear(const S& m00, const S& m01, const S& m10, const S& m11) const {
    const int d = std::max(degree(), 0);
    auto powers = [d](const BivarPoly& base) {
      std::vector<BivarPoly> pw{constant(ScalarTraits<S>::one())};
      for (int k = 1; k <= d; ++k) pw.push_back(pw.back() * base);
      return pw;
    };
    BivarPoly lx, ly;
    lx.add(1, 0, m00);
    lx.add(0, 1, m01);
    ly.add(1, 0, m10);
    ly.add(0, 1, m11);
    const auto px = powers(lx);
    const auto py = powers(ly);
    BivarPoly out;
    for (const auto& [e, c] : terms_) out += (px[e.first] * py[e.second]).scaled(c);
    return out;
  }

  BivarPoly scaled(const S& s) const {
    BivarPoly out;
    for (const auto& [e, c] : terms_) out.add(e.first, e.second, c * s);
    return out;
  }

  template <Field T>
  BivarPoly<T> cast() const {
    BivarPoly<T> out;
    for (const auto& [e, c] : terms_) {
      if constexpr (std::is_same_v<S, T>)
        out.add(e.first, e.second, c);
      else
        out.add(e.first, e.second, ScalarTraits<T>::fromComplex(ScalarTraits<S>::toComplex(c)));
    }
    return out;
  }

  BivarPoly& operator+=(const BivarPoly& o) {
    for (const auto& [e, c] : o.terms_) add(e.first, e.second, c);
    return *this;
  }
  BivarPoly& operator-=(const BivarPoly& o) {
    for (const auto& [e, c] : o.terms_) add(e.first, e.second, -c);
    return *this;
  }
  friend BivarPoly operator+(BivarPoly a, const BivarPoly& b) { return a += b; }
  friend BivarPoly operator-(BivarPoly a, const BivarPoly& b) { return a -= b; }
  friend BivarPoly operator*(const BivarPoly& a, const BivarPoly& b) {
    BivarPoly out;
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) out.add(ea.first + eb.first, ea.second + eb.second, ca * cb);
    return out;
  }
  friend bool operator==(const BivarPoly& a, const BivarPoly& b) { return a.terms_ == b.terms_; }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      if (!first) os << " + ";
      first = false;
      os << "(" << it->second << ")";
      if (it->first.first) os << "*x^" << it->first.first;
      if (it->first.second) os << "*y^" << it->first.second;
    }
    return os.str();
  }

 private:
  template <class T>
  static T toT(const S& c) {
    if constexpr (std::is_same_v<T, S>)
      return c;
    else
      return T(ScalarTraits<S>::toComplex(c));
  }

  Terms terms_;
};

using BivarPolyC = BivarPoly<Complex>;
using BivarPolyQ = BivarPoly<GaussianRational>;

}  // namespace isochron

#endif  // ISOCHRON_BIVAR_POLY_HPP
