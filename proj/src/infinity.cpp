#include "isochron/infinity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "isochron/resultant.hpp"
#include "isochron/univariate.hpp"

namespace isochron {

namespace {

using Series = std::vector<Complex>;

Series mulTrunc(const Series& a, const Series& b, std::size_t len) {
  Series out(len, 0.0);
  for (std::size_t i = 0; i < a.size() && i < len; ++i)
    for (std::size_t j = 0; j < b.size() && i + j < len; ++j) out[i + j] += a[i] * b[j];
  return out;
}

Series inverseTrunc(const Series& a, std::size_t len) {
  Series out(len, 0.0);
  out[0] = 1.0 / a[0];
  for (std::size_t k = 1; k < len; ++k) {
    Complex acc = 0.0;
    for (std::size_t j = 1; j <= k && j < a.size(); ++j) acc += a[j] * out[k - j];
    out[k] = -acc / a[0];
  }
  return out;
}

// powers[l] = D^l truncated to len.
std::vector<Series> powersOf(const Series& d, int maxPower, std::size_t len) {
  std::vector<Series> p{Series(len, 0.0)};
  p[0][0] = 1.0;
  for (int l = 1; l <= maxPower; ++l) p.push_back(mulTrunc(p.back(), d, len));
  return p;
}

int segmentWeight(const NewtonSegment& seg, int p, int q) { return p * seg.from.first + q * seg.from.second; }

int minWeight(const BivarPolyC& f, int p, int q) {
  int w = std::numeric_limits<int>::max();
  for (const auto& [e, c] : f.terms()) w = std::min(w, p * e.first + q * e.second);
  return w;
}

// s^(-c) F(s^p, s^q D(s)) truncated to len coefficients.
Series substituted(const BivarPolyC& f, int p, int q, int c, const Series& d, std::size_t len) {
  const auto pw = powersOf(d, f.degreeIn(Variable::Y), len);
  Series out(len, 0.0);
  for (const auto& [e, coef] : f.terms()) {
    const int shift = p * e.first + q * e.second - c;
    if (shift < 0) throw BranchFailure("term below the Newton segment");
    for (std::size_t i = 0; i + shift < len; ++i) out[i + shift] += coef * pw[e.second][i];
  }
  return out;
}

Series branchSeries(const BivarPolyC& f, int p, int q, int c, Complex d0, int K) {
  // Phi'(d0), where Phi collects the segment terms.
  Complex dphi = 0.0;
  for (const auto& [e, coef] : f.terms())
    if (p * e.first + q * e.second == c && e.second > 0)
      dphi += coef * static_cast<double>(e.second) * std::pow(d0, e.second - 1);
  if (std::abs(dphi) == 0.0) throw BranchFailure("characteristic root is not simple");
  Series d(K + 1, 0.0);
  d[0] = d0;
  for (int i = 1; i <= K; ++i) {
    const Series r = substituted(f, p, q, c, d, i + 1);
    d[i] = -r[i] / dphi;
  }
  return d;
}

double chordal(Complex x, Complex y, const InfinitePoint& p) {
  const double num = std::abs(p.beta * y - p.alpha * x);
  return num / std::sqrt((std::norm(x) + std::norm(y)) * (std::norm(p.alpha) + std::norm(p.beta)));
}

}  // namespace

template <Field S>
std::vector<InfinitePoint> pointsAtInfinity(const HomogeneousHamiltonianSystem<S>& sys) {
  const int n = sys.n;
  int lo = -1, hi = -1;
  for (int j = 0; j <= n + 1; ++j)
    if (sys.nonzero(j)) {
      if (lo < 0) lo = j;
      hi = j;
    }
  if (lo < 0) throw LinearSystem("H_{n+1} vanishes; the closure is a conic");
  std::vector<InfinitePoint> out;
  if (lo > 0) out.push_back({1.0, 0.0, lo, true, false});
  if (hi < n + 1) out.push_back({0.0, 1.0, n + 1 - hi, false, true});
  DensePoly<Complex> mid;
  for (int j = lo; j <= hi; ++j) mid.push_back(ScalarTraits<S>::toComplex(sys.a[j]));
  if (hi > lo)
    for (const auto& r : univariateRoots(mid)) {
      InfinitePoint p;
      p.multiplicity = r.multiplicity;
      if (std::abs(r.value) <= 1.0) {
        p.beta = 1.0;
        p.alpha = r.value;
      } else {
        p.beta = 1.0 / r.value;
        p.alpha = 1.0;
      }
      out.push_back(p);
    }
  return out;
}

template std::vector<InfinitePoint> pointsAtInfinity(const SystemC&);
template std::vector<InfinitePoint> pointsAtInfinity(const SystemQ&);

template <Field S>
NewtonPolygon newtonPolygon(const BivarPoly<S>& f) {
  if (f.isZero()) throw EmptyCarrier("zero polynomial has no carrier");
  if (!isExactlyZero(f.coeff(0, 0))) throw PreconditionViolated("F(0,0) != 0");
  std::vector<Exponent> pts;
  for (const auto& [e, c] : f.terms()) pts.push_back(e);
  // Start on the leftmost column at its lowest point; finish at the lowest row.
  Exponent cur = *std::min_element(pts.begin(), pts.end());
  int lowest = pts[0].second;
  for (const auto& e : pts) lowest = std::min(lowest, e.second);
  NewtonPolygon poly;
  while (cur.second > lowest) {
    Exponent best{-1, -1};
    // Smallest slope (dl/dk), ties to the farthest point.
    for (const auto& e : pts) {
      if (e.second >= cur.second || e.first <= cur.first) continue;
      if (best.first < 0) {
        best = e;
        continue;
      }
      const long lhs = static_cast<long>(e.second - cur.second) * (best.first - cur.first);
      const long rhs = static_cast<long>(best.second - cur.second) * (e.first - cur.first);
      if (lhs < rhs || (lhs == rhs && e.first > best.first)) best = e;
    }
    if (best.first < 0) break;
    NewtonSegment seg;
    seg.from = cur;
    seg.to = best;
    const int dl = best.second - cur.second, dk = best.first - cur.first;
    const int g = std::gcd(dl, dk);
    seg.slopeNum = dl / g;
    seg.slopeDen = dk / g;
    poly.segments.push_back(seg);
    cur = best;
  }
  return poly;
}

template NewtonPolygon newtonPolygon(const BivarPolyC&);
template NewtonPolygon newtonPolygon(const BivarPolyQ&);

InfinityChart chartAt(const SystemC& sys, Complex h, const InfinitePoint& p) {
  const BivarPolyC hp = buildH(sys);
  InfinityChart chart;
  chart.degree = hp.degree();
  BivarPolyC g;
  if (p.isPx) {
    g = hp;
    chart.kind = ChartKind::AtPx;
    chart.orientation = 1.0;
  } else if (p.isPy) {
    g = hp.substituteLinear(0.0, 1.0, 1.0, 0.0);
    chart.kind = ChartKind::AtPy;
    chart.orientation = -1.0;
  } else {
    g = hp.substituteLinear(1.0, 0.0, p.slope(), -1.0);
    chart.kind = ChartKind::Rotated;
    chart.orientation = -1.0;
  }
  const int d = chart.degree;
  for (const auto& [e, c] : g.terms()) {
    const int k = d - e.first - e.second;
    // The multiplicity fixes the vanishing order on X = 0; drop rounding residue below it.
    if (k == 0 && e.second < p.multiplicity) continue;
    chart.f.add(k, e.second, c);
  }
  chart.f.add(d, 0, -h);
  return chart;
}

std::vector<PuiseuxBranch> puiseuxBranches(const BivarPolyC& f, int truncation) {
  const auto poly = newtonPolygon(f);
  std::vector<PuiseuxBranch> out;
  for (std::size_t si = 0; si < poly.segments.size(); ++si) {
    const auto& seg = poly.segments[si];
    // Weights with p*dk + q*dl = 0 along the segment: X = s^p, Y ~ s^q.
    const int p = -seg.slopeNum, q = seg.slopeDen;
    const int c = segmentWeight(seg, p, q);
    // Characteristic polynomial in w = D^p over the segment's lattice points.
    const int span = (seg.from.second - seg.to.second) / p;
    DensePoly<Complex> chi(span + 1, 0.0);
    for (const auto& [e, coef] : f.terms())
      if (p * e.first + q * e.second == c) chi[(e.second - seg.to.second) / p] += coef;
    if (std::abs(chi.back()) == 0.0 || std::abs(chi.front()) == 0.0)
      throw CharacteristicDegenerate("segment endpoint coefficient vanishes");
    for (const auto& r : univariateRoots(chi)) {
      if (r.multiplicity > 1) throw BranchFailure("repeated characteristic root");
      PuiseuxBranch b;
      b.xExponent = p;
      b.yValuation = q;
      b.yLeading = std::pow(r.value, 1.0 / p);
      b.ySeries = branchSeries(f, p, q, c, b.yLeading, truncation);
      b.segment = static_cast<int>(si);
      out.push_back(b);
    }
  }
  return out;
}

std::vector<Complex> branchResidual(const BivarPolyC& f, const PuiseuxBranch& b) {
  return substituted(f, b.xExponent, b.yValuation, minWeight(f, b.xExponent, b.yValuation), b.ySeries,
                     b.ySeries.size());
}

namespace {

// F_Y along the branch as s^v0 * E(s), E truncated to len.
Series fyAlongBranch(const BivarPolyC& f, const PuiseuxBranch& b, int& v0) {
  const BivarPolyC fy = f.derivative(Variable::Y);
  v0 = minWeight(fy, b.xExponent, b.yValuation);
  return substituted(fy, b.xExponent, b.yValuation, v0, b.ySeries, b.ySeries.size());
}

}  // namespace

Complex residueOnBranch(const InfinityChart& chart, const PuiseuxBranch& bIn) {
  PuiseuxBranch b = bIn;
  const int p = b.xExponent;
  // omega = orientation * (-p) s^(p(d-2)-1) ds / F_Y
  for (int attempt = 0; attempt < 4; ++attempt) {
    int v0 = 0;
    const Series e = fyAlongBranch(chart.f, b, v0);
    double scale = 0.0;
    for (const auto& v : e) scale = std::max(scale, std::abs(v));
    std::size_t z = 0;
    while (z < e.size() && std::abs(e[z]) <= 1e-9 * scale) ++z;
    const int need = v0 + static_cast<int>(z) - p * (chart.degree - 2);
    if (need < 0) return 0.0;
    if (z + need < e.size()) {
      const Series tail(e.begin() + static_cast<long>(z), e.end());
      const Series inv = inverseTrunc(tail, need + 1);
      return chart.orientation * -static_cast<double>(p) * inv[need];
    }
    const int k = static_cast<int>(z) + need + 4;
    const int c = minWeight(chart.f, b.xExponent, b.yValuation);
    b.ySeries = branchSeries(chart.f, b.xExponent, b.yValuation, c, b.yLeading, k);
  }
  throw BranchFailure("Laurent expansion did not reach the s^-1 term");
}

Complex residueByContour(const InfinityChart& chart, const PuiseuxBranch& b, int samples) {
  const int p = b.xExponent, q = b.yValuation;
  // Radius well inside the apparent convergence disk of the truncated series.
  double radius = 0.5;
  for (std::size_t i = 1; i < b.ySeries.size(); ++i)
    if (std::abs(b.ySeries[i]) > 0.0)
      radius = std::min(radius, 0.3 * std::pow(std::abs(b.ySeries[0]) / std::abs(b.ySeries[i]), 1.0 / i));
  const BivarPolyC fy = chart.f.derivative(Variable::Y);
  Complex acc = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Complex s = std::polar(radius, 2.0 * kPi * (k + 0.5) / samples);
    const Complex x = std::pow(s, p);
    Complex y = std::pow(s, q) * evalDense(b.ySeries, s);
    for (int it = 0; it < 8; ++it) {
      const Complex d = fy.eval(x, y);
      if (d == 0.0) break;
      y -= chart.f.eval(x, y) / d;
    }
    acc += -static_cast<double>(p) * std::pow(s, p * (chart.degree - 2)) / fy.eval(x, y);
  }
  return chart.orientation * acc / static_cast<double>(samples);
}

std::vector<BranchResidue> residueAtInfinity(const SystemC& sys, Complex h, const InfinitePoint& p, int truncation) {
  if (truncation < 0) truncation = 2 * (sys.n + 1);
  const InfinityChart chart = chartAt(sys, h, p);
  std::vector<BranchResidue> out;
  for (auto& b : puiseuxBranches(chart.f, truncation)) {
    b.chart = chart.kind;
    out.push_back({b, residueOnBranch(chart, b)});
  }
  return out;
}

namespace {

template <Field S>
int lambdaImpl(const HomogeneousHamiltonianSystem<S>& sys, const S& h) {
  const auto level = HBivarPoly<S>::levelSet(buildH(sys));
  if (level.degreeY() < 2) return 0;
  return degreeDropAt(discriminantInY(level), h);
}

template <Field S>
UniPolyOverH<Complex> discriminantAsComplex(const HomogeneousHamiltonianSystem<S>& sys) {
  const auto level = HBivarPoly<S>::levelSet(buildH(sys));
  const auto d = discriminantInY(level);
  UniPolyOverH<Complex> out;
  for (const auto& c : d.coeffs) {
    DensePoly<Complex> cc;
    for (const auto& v : c) cc.push_back(ScalarTraits<S>::toComplex(v));
    out.coeffs.push_back(cc);
  }
  return out;
}

// Nearest-neighbour matching in the chordal metric. A step is accepted when every root moves
// less than half its distance to the nearest other root of the previous configuration.
bool matchRoots(const std::vector<Complex>& prev, const std::vector<Complex>& cur, std::vector<Complex>& out) {
  auto dist = [](Complex a, Complex b) {
    return std::abs(a - b) / std::sqrt((1.0 + std::norm(a)) * (1.0 + std::norm(b)));
  };
  out.assign(prev.size(), 0.0);
  std::vector<bool> used(cur.size(), false);
  for (std::size_t i = 0; i < prev.size(); ++i) {
    double sep = 1e300;
    for (std::size_t j = 0; j < prev.size(); ++j)
      if (j != i) sep = std::min(sep, dist(prev[i], prev[j]));
    double best = 1e300;
    std::size_t arg = cur.size();
    for (std::size_t j = 0; j < cur.size(); ++j)
      if (!used[j] && dist(prev[i], cur[j]) < best) best = dist(prev[i], cur[j]), arg = j;
    // Coincident roots are interchangeable.
    if (arg == cur.size() || (sep > 1e-7 && best > 0.5 * sep)) return false;
    used[arg] = true;
    out[i] = cur[arg];
  }
  return true;
}

struct RayTrack {
  double tFinal = 0.0;
  Complex hFinal;
  std::vector<Complex> finalRoots;
  std::vector<std::size_t> escaping;
};

RayTrack trackAlongRay(const UniPolyOverH<Complex>& d, Complex h, double theta, const TrackingOptions& o) {
  const int g = genericXDegree(d);
  const Complex dir = std::polar(1.0, theta);
  auto coeffsAt = [&](double t) {
    DensePoly<Complex> px = d.atH(h + t * dir);
    px.resize(g + 1, 0.0);
    return px;
  };
  auto leadRatio = [&](double t) {
    const auto px = coeffsAt(t);
    double scale = 0.0;
    for (const auto& v : px) scale = std::max(scale, std::abs(v));
    return std::abs(px[g]) / scale;
  };
  double t = o.startRadius;
  std::vector<Complex> roots = aberthRoots(coeffsAt(t));
  std::vector<std::pair<double, std::vector<Complex>>> history{{t, roots}};
  double ratio = 0.7;
  while (t * ratio > o.endRadius && leadRatio(t * ratio) > 1e-8) {
    std::vector<Complex> matched;
    if (matchRoots(roots, aberthRoots(coeffsAt(t * ratio)), matched)) {
      t *= ratio;
      roots = matched;
      history.push_back({t, roots});
      ratio = std::max(0.3, ratio * ratio);
    } else {
      ratio = std::sqrt(ratio);
      if (ratio > o.minStepRatio) throw TrackingLost("ambiguous ramification-point matching");
    }
  }
  // Escaping points grow like a negative power of t; measure over the last decade of the path.
  std::size_t ref = 0;
  while (ref + 1 < history.size() && history[ref + 1].first >= 10.0 * t) ++ref;
  if (ref + 1 >= history.size()) throw TrackingLost("ray too short to separate escaping points");
  const double dlogt = std::log(history[ref].first / t);
  RayTrack out;
  out.tFinal = t;
  out.hFinal = h + t * dir;
  out.finalRoots = roots;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const double growth =
        std::log(std::max(std::abs(roots[i]), 1e-300) / std::max(std::abs(history[ref].second[i]), 1e-300)) / dlogt;
    if (growth > 0.05 && std::abs(roots[i]) > 1.0) out.escaping.push_back(i);
  }
  return out;
}

template <Field S>
int lambdaAtPointImpl(const HomogeneousHamiltonianSystem<S>& sys, Complex h, const InfinitePoint& p,
                      const TrackingOptions& o) {
  const auto level = HBivarPoly<S>::levelSet(buildH(sys));
  if (level.degreeY() < 2) return 0;
  const auto d = discriminantAsComplex(sys);
  RayTrack track;
  try {
    track = trackAlongRay(d, h, o.theta, o);
  } catch (const TrackingLost&) {
    track = trackAlongRay(d, h, o.retryTheta, o);
  }
  const auto points = pointsAtInfinity(sys);
  const BivarPolyC hc = buildH(sys).template cast<Complex>();
  const BivarPolyC hy = hc.derivative(Variable::Y);
  int count = 0;
  for (std::size_t i : track.escaping) {
    const Complex x = track.finalRoots[i];
    // The ramification point: the root of H_y(x, .) closest to the level h'.
    Complex y{};
    double best = 1e300;
    for (const Complex cand : aberthRoots(hy.yCoefficientsAt(x))) {
      const double r = std::abs(hc.eval(x, cand) - track.hFinal);
      if (r < best) best = r, y = cand;
    }
    const InfinitePoint* nearest = nullptr;
    double dmin = 1e300;
    for (const auto& q : points) {
      const double dq = chordal(x, y, q);
      if (dq < dmin) dmin = dq, nearest = &q;
    }
    if (nearest && std::abs(nearest->alpha - p.alpha) + std::abs(nearest->beta - p.beta) < 1e-9) ++count;
  }
  return count;
}

}  // namespace

int lambdaIndex(const SystemQ& sys, const GaussianRational& h) { return lambdaImpl(sys, h); }
int lambdaIndex(const SystemC& sys, Complex h) { return lambdaImpl(sys, h); }

int lambdaIndexAtPoint(const SystemC& sys, Complex h, const InfinitePoint& p, const TrackingOptions& o) {
  return lambdaAtPointImpl(sys, h, p, o);
}
int lambdaIndexAtPoint(const SystemQ& sys, const GaussianRational& h, const InfinitePoint& p,
                       const TrackingOptions& o) {
  return lambdaAtPointImpl(sys, h.toComplex(), p, o);
}

}  // namespace isochron
