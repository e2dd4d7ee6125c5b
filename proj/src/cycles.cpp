#include "isochron/cycles.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <thread>

#include <Eigen/Dense>
#include "isochron/univariate.hpp"
#include <unsupported/Eigen/FFT>

namespace isochron {

namespace {

constexpr double kQuadratureTarget = 1e-9;
constexpr double kAtypicalTolerance = 1e-8;

struct Jet {
  Complex h, hx, hy;
};

Jet jet(const SystemC& s, Complex x, Complex y) {
  const int d = s.n + 1;
  std::vector<Complex> px(d + 1), py(d + 1);
  px[0] = py[0] = 1.0;
  for (int i = 1; i <= d; ++i) {
    px[i] = px[i - 1] * x;
    py[i] = py[i - 1] * y;
  }
  Jet j{x * y, y, x};
  for (int k = 0; k <= d; ++k) {
    if (s.a[k] == Complex{}) continue;
    const int i = d - k;
    j.h += s.a[k] * px[i] * py[k];
    if (i > 0) j.hx += s.a[k] * static_cast<double>(i) * px[i - 1] * py[k];
    if (k > 0) j.hy += s.a[k] * static_cast<double>(k) * px[i] * py[k - 1];
  }
  return j;
}

double residualTolerance(Complex h) { return 1e-13 * (1.0 + std::abs(h)); }

/// Minimum-norm Newton step onto H = h.
bool correctPoint(const SystemC& s, Complex h, FiberPoint& p, int maxIter = 30) {
  bool within = false;
  for (int it = 0; it < maxIter; ++it) {
    const Jet j = jet(s, p.x, p.y);
    const Complex r = j.h - h;
    if (within) return true;
    // One extra step once within tolerance brings the point down to rounding level.
    within = std::abs(r) <= residualTolerance(h);
    const double g2 = std::norm(j.hx) + std::norm(j.hy);
    if (!(g2 > 0.0)) return false;
    p.x -= r * std::conj(j.hx) / g2;
    p.y -= r * std::conj(j.hy) / g2;
  }
  const Jet j = jet(s, p.x, p.y);
  return std::abs(j.h - h) <= 1e2 * residualTolerance(h);
}

int frequency(int k, int m) { return k < m / 2 ? k : (k == m / 2 && m % 2 == 0 ? 0 : k - m); }

std::vector<Complex> spectralDerivative(const std::vector<Complex>& z) {
  const int m = static_cast<int>(z.size());
  Eigen::FFT<double> fft;
  std::vector<Complex> c;
  fft.fwd(c, z);
  for (int k = 0; k < m; ++k) c[k] *= Complex{0.0, static_cast<double>(frequency(k, m))};
  std::vector<Complex> out;
  fft.inv(out, c);
  return out;
}

std::vector<Complex> interpolateDouble(const std::vector<Complex>& z) {
  const int m = static_cast<int>(z.size());
  Eigen::FFT<double> fft;
  std::vector<Complex> c;
  fft.fwd(c, z);
  std::vector<Complex> c2(2 * m, Complex{});
  for (int k = 0; k < m; ++k) {
    if (m % 2 == 0 && k == m / 2) {
      c2[k] += c[k];
      c2[2 * m - k] += c[k];
    } else if (k < m / 2 || (m % 2 == 1 && k == m / 2)) {
      c2[k] = 2.0 * c[k];
    } else {
      c2[k + m] = 2.0 * c[k];
    }
  }
  std::vector<Complex> out;
  fft.inv(out, c2);
  return out;
}

std::vector<FiberPoint> distinct(const FiberLoop& loop) {
  return {loop.samples.begin(), loop.samples.end() - 1};
}

void closeUp(std::vector<FiberPoint>& pts) { pts.push_back(pts.front()); }

Complex trapezoid(const SystemC& s, const std::vector<FiberPoint>& pts) {
  const int m = static_cast<int>(pts.size());
  std::vector<Complex> xs(m), ys(m);
  for (int k = 0; k < m; ++k) {
    xs[k] = pts[k].x;
    ys[k] = pts[k].y;
  }
  const auto dx = spectralDerivative(xs);
  const auto dy = spectralDerivative(ys);
  Complex sum{};
  for (int k = 0; k < m; ++k) {
    const Jet j = jet(s, xs[k], ys[k]);
    // dx/H_y written so that it stays regular where H_y vanishes on the fiber.
    sum += (std::conj(j.hy) * dx[k] - std::conj(j.hx) * dy[k]) / (std::norm(j.hx) + std::norm(j.hy));
  }
  return sum * (2.0 * kPi / m);
}

/// Newton in y at fixed x, with one extra step once within tolerance.
bool solveYAt(const SystemC& s, Complex h, Complex x, Complex& y, int maxIter = 30) {
  bool within = false;
  for (int it = 0; it < maxIter; ++it) {
    const Jet j = jet(s, x, y);
    const Complex r = j.h - h;
    if (within) return true;
    within = std::abs(r) <= residualTolerance(h);
    if (j.hy == Complex{}) return false;
    y -= r / j.hy;
  }
  return false;
}

/// Moves a sample onto the fiber, keeping x unless the fiber is nearly vertical there.
bool settle(const SystemC& s, Complex h, FiberPoint& p) {
  FiberPoint q = p;
  if (solveYAt(s, h, q.x, q.y) && std::abs(q.y - p.y) < 1e-3 * (1.0 + std::abs(p.y))) {
    p = q;
    return true;
  }
  return correctPoint(s, h, p);
}

void split(const std::vector<FiberPoint>& pts, std::vector<Complex>& xs, std::vector<Complex>& ys) {
  xs.resize(pts.size());
  ys.resize(pts.size());
  for (size_t k = 0; k < pts.size(); ++k) {
    xs[k] = pts[k].x;
    ys[k] = pts[k].y;
  }
}

std::vector<FiberPoint> refine(const SystemC& s, Complex h, const std::vector<FiberPoint>& pts) {
  const int m = static_cast<int>(pts.size());
  std::vector<Complex> xs, ys;
  split(pts, xs, ys);
  const auto x2 = interpolateDouble(xs);
  const auto y2 = interpolateDouble(ys);
  std::vector<FiberPoint> out(2 * m);
  for (int k = 0; k < 2 * m; ++k) {
    if (k % 2 == 0) {
      out[k] = pts[k / 2];
      continue;
    }
    out[k] = {x2[k], y2[k]};
    if (!settle(s, h, out[k])) throw NewtonDivergence("refinement sample did not return to the fiber");
  }
  return out;
}

/// Largest Fourier magnitude with |frequency| in (lo, hi], relative to the largest overall.
double band(const std::vector<Complex>& c, int lo, int hi) {
  const int m = static_cast<int>(c.size());
  double total = 0.0, part = 0.0;
  for (int k = 0; k < m; ++k) {
    const double a = std::abs(c[k]);
    total = std::max(total, a);
    const int f = std::abs(frequency(k, m));
    if (f > lo && f <= hi) part = std::max(part, a);
  }
  return total > 0.0 ? part / total : 0.0;
}

/// Band-limited interpolation onto a grid `factor` times finer.
std::vector<Complex> oversample(const std::vector<Complex>& z, int factor) {
  const int m = static_cast<int>(z.size());
  Eigen::FFT<double> fft;
  std::vector<Complex> c;
  fft.fwd(c, z);
  std::vector<Complex> up(factor * m, Complex{});
  for (int k = 0; k < m; ++k) {
    const int f = frequency(k, m);
    if (m % 2 == 0 && k == m / 2) {
      up[m / 2] += 0.5 * double(factor) * c[k];
      up[factor * m - m / 2] += 0.5 * double(factor) * c[k];
      continue;
    }
    up[f >= 0 ? f : f + factor * m] = double(factor) * c[k];
  }
  std::vector<Complex> out;
  fft.inv(out, up);
  return out;
}

/// Value at fractional index t of a periodic fine grid, by 8-point Lagrange interpolation.
Complex lagrangeAt(const std::vector<Complex>& g, double t) {
  const int n = static_cast<int>(g.size());
  const int base = static_cast<int>(std::floor(t)) - 3;
  Complex v{};
  for (int i = 0; i < 8; ++i) {
    double w = 1.0;
    for (int j = 0; j < 8; ++j)
      if (j != i) w *= (t - (base + j)) / double(i - j);
    v += w * g[((base + i) % n + n) % n];
  }
  return v;
}

/// Redistributes the samples along the same x-curve so that spacing is uniform in arc length
/// measured relative to the distance to the nearest node.
bool reparametrize(const SystemC& s, Complex h, std::vector<FiberPoint>& pts, const std::vector<Complex>& nodes) {
  const int m = static_cast<int>(pts.size());
  if (nodes.empty()) return false;
  std::vector<Complex> xs, ys;
  split(pts, xs, ys);
  const auto dx = spectralDerivative(xs);
  std::vector<Complex> density(m);
  for (int k = 0; k < m; ++k) {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& p : nodes) d = std::min(d, std::abs(xs[k] - p));
    density[k] = std::abs(dx[k]) / d;
  }
  Eigen::FFT<double> fft;
  std::vector<Complex> c;
  fft.fwd(c, density);
  for (int k = 0; k < m; ++k) c[k] *= std::exp(-std::pow(frequency(k, m) / (m / 32.0), 2));
  std::vector<Complex> smooth;
  fft.inv(smooth, c);
  double mean = 0.0;
  for (const auto& v : smooth) mean += v.real();
  mean /= m;
  const int factor = 8, fine = factor * m;
  std::vector<double> rho(fine);
  {
    const auto up = oversample(smooth, factor);
    for (int k = 0; k < fine; ++k) rho[k] = std::max(up[k].real(), 0.1 * mean);
  }
  std::vector<double> cum(fine + 1, 0.0);
  for (int k = 0; k < fine; ++k) cum[k + 1] = cum[k] + 0.5 * (rho[k] + rho[(k + 1) % fine]);
  const auto xf = oversample(xs, factor), yf = oversample(ys, factor);
  std::vector<FiberPoint> out(m);
  int j = 0;
  for (int k = 0; k < m; ++k) {
    const double target = cum[fine] * k / m;
    while (cum[j + 1] < target) ++j;
    const double t = j + (target - cum[j]) / (cum[j + 1] - cum[j]);
    FiberPoint q{lagrangeAt(xf, t), lagrangeAt(yf, t)};
    const Complex seed = q.y;
    if (!solveYAt(s, h, q.x, q.y) || std::abs(q.y - seed) > 1e-6 * (1.0 + std::abs(seed))) return false;
    out[k] = q;
  }
  pts = std::move(out);
  return true;
}

/// Doubles the sample count until both coordinates are spectrally resolved; redistributes the
/// samples first when `nodes` (points the loop must keep clear of) are given.
void ensureResolved(const SystemC& s, Complex h, std::vector<FiberPoint>& pts, int maxSamples,
                    const std::vector<Complex>& nodes = {}) {
  Eigen::FFT<double> fft;
  bool redistributed = false;
  for (;;) {
    const int m = static_cast<int>(pts.size());
    std::vector<Complex> xs, ys, cx, cy;
    split(pts, xs, ys);
    fft.fwd(cx, xs);
    fft.fwd(cy, ys);
    if (band(cx, m / 4, m / 2) < 1e-6 && band(cy, m / 4, m / 2) < 1e-6) return;
    if (!redistributed) {
      redistributed = true;
      std::vector<FiberPoint> trial = pts;
      if (reparametrize(s, h, trial, nodes)) {
        pts = std::move(trial);
        continue;
      }
    }
    if (2 * m > maxSamples) throw RamificationCollision("loop resolution exceeded the sample limit");
    pts = refine(s, h, pts);
  }
}

/// Coefficients c_k(x) of H(x, y) - h as a polynomial in y.
std::vector<Complex> yCoefficients(const SystemC& s, Complex h, Complex x) {
  const int d = s.n + 1;
  std::vector<Complex> c(d + 1, Complex{});
  for (int k = 0; k <= d; ++k) c[k] = s.a[k] * std::pow(x, d - k);
  c[1] += x;
  c[0] -= h;
  return c;
}

int yDegree(const SystemC& s) {
  int top = 1;
  for (int k = 0; k <= s.n + 1; ++k)
    if (s.a[k] != Complex{}) top = std::max(top, k);
  return top;
}

/// Resultant in y of H - h and H_y at x.
Complex ySylvesterAt(const SystemC& s, Complex h, Complex x, int dy) {
  const auto c = yCoefficients(s, h, x);
  const int size = 2 * dy - 1;
  Eigen::MatrixXcd syl = Eigen::MatrixXcd::Zero(size, size);
  for (int r = 0; r < dy - 1; ++r)
    for (int k = 0; k <= dy; ++k) syl(r, r + dy - k) = c[k];
  for (int r = 0; r < dy; ++r)
    for (int k = 1; k <= dy; ++k) syl(dy - 1 + r, r + dy - k) = double(k) * c[k];
  return syl.partialPivLu().determinant();
}

struct BranchSet {
  std::vector<Complex> x;   // projections of the solutions of H = h, H_y = 0
  std::vector<Complex> hx;  // H_x there; each moves with dx/dh = 1 / H_x
  std::vector<Complex> poles;  // x where the leading y coefficient vanishes
};

/// Every finite ramification point of the projection (x, y) -> x on H = h.
BranchSet branchSet(const SystemC& s, Complex h) {
  const int dy = yDegree(s);
  BranchSet out;
  {
    DensePoly<Complex> lead(s.n + 2, Complex{});
    lead[s.n + 1 - dy] = s.a[dy];
    if (dy == 1) lead[1] += 1.0;
    for (const auto& r : aberthRoots(trimmed(lead))) out.poles.push_back(r);
  }
  if (dy < 2) return out;
  const int np = 64;
  std::vector<Complex> vals(np);
  for (int k = 0; k < np; ++k) vals[k] = ySylvesterAt(s, h, std::polar(1.0, 2.0 * kPi * k / np), dy);
  Eigen::FFT<double> fft;
  std::vector<Complex> coef;
  fft.fwd(coef, vals);
  double big = 0.0;
  for (auto& c : coef) {
    c /= double(np);
    big = std::max(big, std::abs(c));
  }
  while (!coef.empty() && std::abs(coef.back()) < 1e-11 * big) coef.pop_back();
  const BivarPolyC hc = buildH(s);
  const BivarPolyC hy = hc.derivative(Variable::Y);
  const BivarPolyC hxy = hy.derivative(Variable::X), hyy = hy.derivative(Variable::Y);
  for (Complex x : aberthRoots(coef)) {
    bool isPole = false;
    for (const auto& p : out.poles) isPole = isPole || std::abs(p - x) < 1e-6 * (1.0 + std::abs(p));
    if (isPole) continue;
    auto c = yCoefficients(s, h, x);
    c.resize(dy + 1);
    const auto ys = aberthRoots(c);
    double best = std::numeric_limits<double>::infinity();
    Complex y{};
    for (size_t i = 0; i < ys.size(); ++i)
      for (size_t j = i + 1; j < ys.size(); ++j)
        if (std::abs(ys[i] - ys[j]) < best) {
          best = std::abs(ys[i] - ys[j]);
          y = 0.5 * (ys[i] + ys[j]);
        }
    for (int it = 0; it < 40; ++it) {
      const Jet j = jet(s, x, y);
      const Complex f1 = j.h - h, f2 = j.hy;
      const Complex a = hxy.eval(x, y), d = hyy.eval(x, y);
      const Complex det = j.hx * d - j.hy * a;
      if (det == Complex{}) break;
      const Complex dx = -(d * f1 - j.hy * f2) / det;
      const Complex dyy = -(j.hx * f2 - a * f1) / det;
      x += dx;
      y += dyy;
      if (std::abs(dx) + std::abs(dyy) < 1e-15 * (1.0 + std::abs(x) + std::abs(y))) break;
    }
    const Jet j = jet(s, x, y);
    if (std::abs(j.h - h) > 1e-10 * (1.0 + std::abs(h)) || std::abs(j.hy) > 1e-8 * (1.0 + std::abs(j.hx))) continue;
    bool dup = false;
    for (const auto& b : out.x) dup = dup || std::abs(b - x) < 1e-9 * (1.0 + std::abs(x));
    if (!dup) {
      out.x.push_back(x);
      out.hx.push_back(j.hx);
    }
  }
  return out;
}

int winding(const std::vector<FiberPoint>& pts, Complex p) {
  double total = 0.0;
  const size_t m = pts.size();
  for (size_t k = 0; k < m; ++k) total += std::arg((pts[(k + 1) % m].x - p) / (pts[k].x - p));
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

bool isAtypical(Complex h, const std::vector<Complex>& atyp) {
  for (const auto& a : atyp)
    if (std::abs(h - a) < kAtypicalTolerance * (1.0 + std::abs(a))) return true;
  return false;
}

double distanceToSet(Complex h, const std::vector<Complex>& values) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& v : values) d = std::min(d, std::abs(h - v));
  return d;
}

std::string formatComplex(Complex z) {
  std::ostringstream os;
  os.precision(6);
  os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return os.str();
}

void normalizeOrientation(FiberLoop& loop) {
  const PeriodSample p = period(loop);
  if (p.T.imag() < 0) {
    std::reverse(loop.samples.begin(), loop.samples.end());
    loop.orientation =
        loop.orientation == LoopOrientation::Standard ? LoopOrientation::Reversed : LoopOrientation::Standard;
  }
}

/// Loop xi = rho e^{i theta} on H = h near a Morse point p0 with H - h0 ~ xi * eta, (x, y) = p0 + A (xi, eta).
FiberLoop liftInLinearChart(const SystemC& s, Complex h, Complex h0, FiberPoint p0, const Eigen::Matrix2cd& A,
                            int samples, double rho) {
  if (samples < 8) throw PreconditionViolated("need at least 8 samples");
  const Complex dh = h - h0;
  bool newtonFailed = false;
  const double rho0 = rho;
  // Radii rho0, rho0 / 2, 2 rho0, rho0 / 4, 4 rho0, ...
  for (int attempt = 0; attempt <= 8; ++attempt) {
    rho = rho0 * std::pow(2.0, attempt % 2 == 1 ? -(attempt + 1) / 2 : attempt / 2);
    std::vector<FiberPoint> pts;
    pts.reserve(samples + 1);
    Complex prevEta{}, firstEta{};
    bool ok = true;
    newtonFailed = false;
    for (int k = 0; k < samples && ok; ++k) {
      const Complex xi = std::polar(rho, 2.0 * kPi * k / samples);
      Complex eta = dh / xi;
      bool converged = false;
      for (int it = 0; it < 60; ++it) {
        const Complex x = p0.x + A(0, 0) * xi + A(0, 1) * eta;
        const Complex y = p0.y + A(1, 0) * xi + A(1, 1) * eta;
        const Jet j = jet(s, x, y);
        const Complex r = j.h - h;
        if (std::abs(r) <= residualTolerance(h)) {
          converged = true;
          break;
        }
        const Complex fp = j.hx * A(0, 1) + j.hy * A(1, 1);
        if (fp == Complex{}) break;
        eta -= r / fp;
      }
      if (!converged) {
        newtonFailed = true;
        ok = false;
        break;
      }
      if (std::abs(eta * xi / dh - 1.0) > 0.5) ok = false;
      if (k > 0 && std::abs(eta - prevEta) > rho / 4) ok = false;
      if (k == 0) firstEta = eta;
      prevEta = eta;
      pts.push_back({p0.x + A(0, 0) * xi + A(0, 1) * eta, p0.y + A(1, 0) * xi + A(1, 1) * eta});
    }
    if (ok && std::abs(prevEta - firstEta) > rho / 4) ok = false;
    if (!ok) continue;
    closeUp(pts);
    FiberLoop loop;
    loop.system = s;
    loop.h = h;
    loop.samples = std::move(pts);
    return loop;
  }
  if (newtonFailed) throw NewtonDivergence("fiber Newton solve failed at every loop radius");
  throw BranchJump("loop left its branch at every radius from rho/16 to 16 rho");
}

Eigen::Matrix2cd morseFrame(const SystemC& s, FiberPoint p) {
  const BivarPolyC hc = buildH(s);
  const BivarPolyC hx = hc.derivative(Variable::X), hy = hc.derivative(Variable::Y);
  const Complex A = hx.derivative(Variable::X).eval(p.x, p.y) / 2.0;
  const Complex B = hx.derivative(Variable::Y).eval(p.x, p.y) / 2.0;
  const Complex C = hy.derivative(Variable::Y).eval(p.x, p.y) / 2.0;
  // Q = A u^2 + 2 B u v + C v^2 = xi * eta with (xi, eta) = M (u, v).
  Eigen::Matrix2cd M;
  const double scale = std::abs(A) + std::abs(B) + std::abs(C);
  if (std::abs(A) <= 1e-14 * scale && std::abs(C) <= 1e-14 * scale) {
    M << 1.0, 0.0, 0.0, 2.0 * B;
  } else if (std::abs(A) >= std::abs(C)) {
    const Complex disc = std::sqrt(B * B - A * C);
    const Complex r1 = (-B + disc) / A, r2 = (-B - disc) / A;
    M << 1.0, -r1, A, -A * r2;
  } else {
    const Complex disc = std::sqrt(B * B - A * C);
    const Complex s1 = (-B + disc) / C, s2 = (-B - disc) / C;
    M << -s1, 1.0, -C * s2, C;
  }
  if (std::abs(M.determinant()) < 1e-12 * (1.0 + M.norm() * M.norm()))
    throw PreconditionViolated("critical point is not Morse");
  return M.inverse();
}

}  // namespace

double FiberLoop::maxResidual() const {
  double r = 0.0;
  for (const auto& p : samples) r = std::max(r, std::abs(jet(system, p.x, p.y).h - h));
  return r;
}

double FiberLoop::minGradient() const {
  double g = std::numeric_limits<double>::infinity();
  for (const auto& p : samples) g = std::min(g, std::abs(jet(system, p.x, p.y).hy));
  return g;
}

std::string anchorName(const LoopAnchor& a) {
  switch (a.kind) {
    case LoopAnchor::Kind::Origin: return "origin";
    case LoopAnchor::Kind::Saddle: return "saddle(" + std::to_string(a.index) + ")";
    case LoopAnchor::Kind::InfinityCycle:
      return std::string("infinityCycle(") + (a.point.isPy ? "P_y" : a.point.isPx ? "P_x" : "P") + "," +
             std::to_string(a.index) + ")";
    case LoopAnchor::Kind::Continued: return "continued(" + a.path + ")";
  }
  return "unknown";
}

double HPath::length() const {
  double l = 0.0;
  for (size_t i = 1; i < waypoints.size(); ++i) l += std::abs(waypoints[i] - waypoints[i - 1]);
  return l;
}

HPath circlePath(Complex center, Complex start, int pieces) {
  HPath p;
  const Complex r = start - center;
  for (int k = 0; k < pieces; ++k) p.waypoints.push_back(center + r * std::polar(1.0, 2.0 * kPi * k / pieces));
  p.waypoints.push_back(start);
  return p;
}

void annotateWinding(HPath& path, const std::vector<Complex>& values) {
  path.encircles.clear();
  if (path.waypoints.size() < 2 || std::abs(path.start() - path.end()) > 1e-12 * (1.0 + std::abs(path.start())))
    return;
  for (const auto& v : values) {
    double total = 0.0;
    for (size_t i = 1; i < path.waypoints.size(); ++i)
      total += std::arg((path.waypoints[i] - v) / (path.waypoints[i - 1] - v));
    const int w = static_cast<int>(std::lround(total / (2.0 * kPi)));
    if (w != 0) path.encircles.push_back({v, w});
  }
}

double defaultClearance(const std::vector<Complex>& values) {
  double d = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < values.size(); ++i)
    for (size_t j = i + 1; j < values.size(); ++j) d = std::min(d, std::abs(values[i] - values[j]));
  return std::isfinite(d) ? 0.1 * d : 1.0;
}

double pathClearance(const HPath& path, const std::vector<Complex>& values) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& v : values) {
    for (size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
      const Complex a = path.waypoints[i], b = path.waypoints[i + 1];
      const Complex ab = b - a;
      double t = std::norm(ab) > 0 ? std::real((v - a) * std::conj(ab)) / std::norm(ab) : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      d = std::min(d, std::abs(a + t * ab - v));
    }
    if (path.waypoints.size() == 1) d = std::min(d, std::abs(path.waypoints[0] - v));
  }
  return d;
}

PeriodSample period(const FiberLoop& loop) {
  if (loop.samples.size() < 9) throw PreconditionViolated("loop has too few samples");
  std::vector<FiberPoint> pts = distinct(loop);
  for (int doubling = 0; doubling <= 2; ++doubling) {
    const Complex full = trapezoid(loop.system, pts);
    std::vector<FiberPoint> half;
    for (size_t k = 0; k < pts.size(); k += 2) half.push_back(pts[k]);
    const double err = std::abs(full - trapezoid(loop.system, half));
    if (err < kQuadratureTarget) return {loop.h, full, loop.anchor, err};
    if (doubling < 2) pts = refine(loop.system, loop.h, pts);
  }
  throw QuadratureStall("period did not converge after two sample doublings");
}

FiberLoop liftOriginLoop(const SystemC& sys, Complex h, int samples, double c) {
  if (h == Complex{}) throw PreconditionViolated("h must be nonzero");
  if (isAtypical(h, atypicalValues(sys))) throw PreconditionViolated("h is an atypical value");
  Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  FiberLoop loop = liftInLinearChart(sys, h, 0.0, {0.0, 0.0}, id, samples, c * std::sqrt(std::abs(h)));
  loop.anchor.kind = LoopAnchor::Kind::Origin;
  return loop;
}

FiberLoop liftSaddleLoop(const SystemC& sys, Complex h, const CriticalPoint& saddle, int samples) {
  const auto extra = l0ExtraCriticalPoints(sys);
  int index = -1;
  for (size_t i = 0; i < extra.size(); ++i)
    if (std::abs(extra[i].x - saddle.x) + std::abs(extra[i].y - saddle.y) < 1e-6) index = static_cast<int>(i);
  if (index < 0) throw PreconditionViolated("point is not a critical point on L_0 besides the origin");
  const CriticalPoint& p = extra[index];
  if (p.hessianRank != 2) throw PreconditionViolated("saddle is degenerate");
  if (h == p.value) throw PreconditionViolated("h equals the critical value");
  if (isAtypical(h, atypicalValues(sys))) throw PreconditionViolated("h is an atypical value");
  const Eigen::Matrix2cd frame = morseFrame(sys, {p.x, p.y});
  FiberLoop loop =
      liftInLinearChart(sys, h, p.value, {p.x, p.y}, frame, samples, std::sqrt(std::abs(h - p.value)));
  loop.anchor.kind = LoopAnchor::Kind::Saddle;
  loop.anchor.index = index;
  normalizeOrientation(loop);
  return loop;
}

std::vector<FiberLoop> liftInfinityCycles(const SystemC& sys, Complex h, const InfinitePoint& p, int samples) {
  if (classifyIsochronicity(sys).verdict != Verdict::NotIsochronous)
    throw PreconditionViolated("infinity cycles are built for non-isochronous systems only");
  if (!p.isPx && !p.isPy) throw PreconditionViolated("only P_x and P_y are supported");
  const int n = sys.n, N = p.multiplicity;
  if (!(N > 1 && 2 * N < n + 1)) throw PreconditionViolated("multiplicity must satisfy 1 < N < (n+1)/2");
  if (h == Complex{}) throw PreconditionViolated("h must be nonzero");
  if (isAtypical(h, atypicalValues(sys))) throw PreconditionViolated("h is an atypical value");

  // Work at P_x; P_y is handled through the swap x <-> y.
  std::vector<Complex> a = sys.a;
  if (p.isPy) std::reverse(a.begin(), a.end());
  for (int j = 0; j < N; ++j)
    if (a[j] != Complex{}) throw PreconditionViolated("multiplicity does not match the coefficients");
  if (a[N] == Complex{}) throw PreconditionViolated("multiplicity does not match the coefficients");
  const int e = n + 1 - 2 * N;

  // H(u^-(N-1), u^(n-N) v) = u^e G(u, v), G = v + sum_{j >= N} a_j u^((j-N)(n-1)) v^j.
  auto G = [&](Complex u, Complex v, Complex& gv) {
    Complex g = v;
    gv = 1.0;
    const Complex w = std::pow(u, n - 1);
    Complex wp = 1.0;
    for (int j = N; j <= n + 1; ++j, wp *= w) {
      if (a[j] == Complex{}) continue;
      g += a[j] * wp * std::pow(v, j);
      gv += a[j] * wp * static_cast<double>(j) * std::pow(v, j - 1);
    }
    return g;
  };

  std::vector<Complex> centers{0.0};
  const Complex base = std::pow(-1.0 / a[N], 1.0 / (N - 1));
  for (int k = 0; k < N - 1; ++k) centers.push_back(base * std::polar(1.0, 2.0 * kPi * k / (N - 1)));
  const int g = std::gcd(N - 1, n - N);

  std::vector<FiberLoop> loops;
  for (int idx = 0; idx < N; ++idx) {
    const Complex v0 = centers[idx];
    const Complex c = idx == 0 ? Complex{1.0} : Complex{1.0 - N};
    // Arc in u whose image closes up in (x, y): the deck group u -> zeta u, zeta^(N-1) = 1, fixes v = 0
    // entirely and fixes v_j through its subgroup of order gcd(N-1, n-N).
    const double arc = idx == 0 ? 2.0 * kPi / (N - 1) : 2.0 * kPi / g;
    double rho = std::pow(std::abs(h / c), 1.0 / (e + 1));
    bool built = false;
    for (int attempt = 0; attempt <= 6 && !built; ++attempt, rho /= 2.0) {
      std::vector<FiberPoint> pts;
      Complex prev{};
      bool ok = true;
      for (int k = 0; k < samples && ok; ++k) {
        const Complex u = std::polar(rho, arc * k / samples);
        const Complex ue = std::pow(u, e);
        Complex v = v0 + h / (c * ue);
        bool converged = false;
        for (int it = 0; it < 60; ++it) {
          Complex gv;
          const Complex r = ue * G(u, v, gv) - h;
          if (std::abs(r) <= residualTolerance(h)) {
            converged = true;
            break;
          }
          v -= r / (ue * gv);
        }
        if (!converged || std::abs(v - v0) > 2.0 * rho || (k > 0 && std::abs(v - prev) > rho / 4)) ok = false;
        prev = v;
        FiberPoint q{std::pow(u, -(N - 1)), std::pow(u, n - N) * v};
        if (p.isPy) std::swap(q.x, q.y);
        if (ok && !correctPoint(sys, h, q)) ok = false;
        pts.push_back(q);
      }
      if (!ok) continue;
      closeUp(pts);
      FiberLoop loop;
      loop.system = sys;
      loop.h = h;
      loop.samples = std::move(pts);
      loop.anchor.kind = LoopAnchor::Kind::InfinityCycle;
      loop.anchor.point = p;
      loop.anchor.index = idx;
      normalizeOrientation(loop);
      loops.push_back(std::move(loop));
      built = true;
    }
    if (!built) throw BlowupChartFailure("no loop radius separates the point " + std::to_string(idx) +
                                         " on the exceptional divisor");
  }
  return loops;
}

FiberLoop continueLoop(const SystemC& sys, const FiberLoop& loop, const HPath& path,
                       const ContinuationOptions& opts) {
  if (path.waypoints.empty()) throw PreconditionViolated("empty path");
  if (std::abs(path.start() - loop.h) > 1e-12 * (1.0 + std::abs(loop.h)))
    throw PreconditionViolated("path does not start at the loop's level");
  const auto atyp = atypicalValues(sys);
  if (pathClearance(path, atyp) < defaultClearance(atyp))
    throw PreconditionViolated("path passes too close to an atypical value");

  std::vector<FiberPoint> pts = distinct(loop);
  Complex h = loop.h;
  auto minRatio = [&](const std::vector<FiberPoint>& q) {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& p : q) {
      const Jet j = jet(sys, p.x, p.y);
      r = std::min(r, std::abs(j.hy) / std::sqrt(std::norm(j.hx) + std::norm(j.hy)));
    }
    return r;
  };

  // Moves every sample from level h to level target. The x-plane is dragged by the Shepard interpolant
  // of the branch point displacements (poles stay fixed), so no branch point crosses the contour; on top
  // the contour is rescaled about its centroid by whichever of 1, 1 +- 1% keeps it farthest from them.
  BranchSet branches = branchSet(sys, h);
  auto attempt = [&](Complex target, const BranchSet& next, double scale, std::vector<FiberPoint>& moved) {
    const Complex dh = target - h;
    std::vector<Complex> nodes = branches.poles, shift(branches.poles.size(), Complex{});
    std::vector<int> windings;
    for (size_t i = 0; i < branches.x.size(); ++i) {
      const Complex predicted = branches.x[i] + dh / branches.hx[i];
      double first = std::numeric_limits<double>::infinity(), second = first;
      Complex match{};
      for (const auto& b : next.x) {
        const double d = std::abs(b - predicted);
        if (d < first) {
          second = first;
          first = d;
          match = b;
        } else {
          second = std::min(second, d);
        }
      }
      if (!(first < 0.25 * second) && next.x.size() > 1) return false;
      nodes.push_back(branches.x[i]);
      shift.push_back(match - branches.x[i]);
    }
    for (const auto& p : nodes) windings.push_back(winding(pts, p));
    Complex centroid{};
    for (const auto& q : pts) centroid += q.x;
    centroid /= double(pts.size());
    moved = pts;
    for (auto& q : moved) {
      const Jet j = jet(sys, q.x, q.y);
      if (std::abs(j.hy) < opts.gradientFloor) return false;
      double wsum = 0.0;
      Complex dx{};
      for (size_t i = 0; i < nodes.size(); ++i) {
        const double w = 1.0 / std::norm(q.x - nodes[i]);
        wsum += w;
        dx += w * shift[i];
      }
      if (wsum > 0.0) dx /= wsum;
      dx += (scale - 1.0) * (q.x + dx - centroid);
      const Complex seed = q.y + (dh - j.hx * dx) / j.hy;
      const Complex y0 = q.y;
      q.x += dx;
      q.y = seed;
      if (!solveYAt(sys, target, q.x, q.y, 12)) return false;
      if (std::abs(q.y - seed) > 0.1 * std::abs(seed - y0) + 1e-10 * (1.0 + std::abs(seed))) return false;
    }
    for (size_t i = 0; i < nodes.size(); ++i)
      if (winding(moved, nodes[i] + shift[i]) != windings[i]) return false;
    return true;
  };
  auto step = [&](Complex target) {
    const BranchSet next = branchSet(sys, target);
    if (next.x.size() != branches.x.size()) return false;
    std::vector<FiberPoint> best, trial;
    double bestRatio = -1.0;
    for (double scale : {1.0, 1.01, 0.99}) {
      if (!attempt(target, next, scale, trial)) continue;
      const double r = minRatio(trial);
      if (r > bestRatio * (1.0 + 1e-3)) {
        bestRatio = r;
        best = std::move(trial);
      }
    }
    if (bestRatio < 0.0) return false;
    pts = std::move(best);
    h = target;
    branches = next;
    return true;
  };

  for (size_t w = 1; w < path.waypoints.size(); ++w) {
    const Complex goal = path.waypoints[w];
    while (std::abs(goal - h) > 0.0) {
      double len = std::min(std::abs(goal - h), opts.stepFraction * distanceToSet(h, atyp));
      int halvings = 0;
      for (;;) {
        const Complex target = std::abs(goal - h) <= len ? goal : h + (goal - h) / std::abs(goal - h) * len;
        if (step(target)) break;
        if (++halvings > 12) throw RamificationCollision("continuation step collapsed near h = " + formatComplex(h));
        len /= 2.0;
      }
      std::vector<Complex> nodes = branches.poles;
      nodes.insert(nodes.end(), branches.x.begin(), branches.x.end());
      ensureResolved(sys, h, pts, opts.maxSamples, nodes);
    }
  }
  closeUp(pts);
  FiberLoop out;
  out.system = sys;
  out.h = h;
  out.samples = std::move(pts);
  out.orientation = loop.orientation;
  out.anchor.kind = LoopAnchor::Kind::Continued;
  std::ostringstream desc;
  desc << anchorName(loop.anchor) << " along " << path.waypoints.size() << " waypoints";
  for (const auto& e : path.encircles) desc << ", winding " << e.winding << " about " << formatComplex(e.value);
  out.anchor.path = desc.str();
  return out;
}

namespace {

/// Smallest j > 0 with a_j != 0 (or a_{n+1-j} for the dual side); 0 when a_0 != 0.
int leadingZeros(const std::vector<Complex>& a) {
  int k = 0;
  while (k < static_cast<int>(a.size()) && a[k] == Complex{}) ++k;
  return k;
}

Complex predictedAsymptotic(int caseId, int n, int N1, int N2) {
  const Complex twoPiI = kTwoPiI;
  switch (caseId) {
    case 1: return twoPiI;
    case 2: return twoPiI + twoPiI / double(n - 1);
    case 3: return twoPiI + 2.0 * twoPiI / double(n - 1);
    case 4: return twoPiI + twoPiI / double(n - 1) + twoPiI * double(N1) / double(N1 - 1);
    case 5: return twoPiI + twoPiI * double(N1) / double(N1 - 1) + twoPiI * double(N2) / double(N2 - 1);
  }
  return {};
}

}  // namespace

MonodromyReport monodromyLatticeCheck(const SystemC& sys, int caseId) {
  if (caseId < 1 || caseId > 5) throw CaseMismatch("case must be 1..5");
  const int n = sys.n;
  const auto& a = sys.a;
  std::vector<Complex> rev(a.rbegin(), a.rend());
  const int z0 = leadingZeros(a), z1 = leadingZeros(rev);  // N1 and N2 when they exceed 1
  auto inRange = [&](int N) { return N > 1 && 2 * N < n + 1; };
  bool match = false;
  switch (caseId) {
    case 1: match = z0 == 0 && z1 == 0; break;
    case 2: match = (z0 == 1 && z1 == 0) || (z0 == 0 && z1 == 1); break;
    case 3: match = z0 == 1 && z1 == 1; break;
    case 4: match = (inRange(z0) && z1 == 1) || (z0 == 1 && inRange(z1)); break;
    case 5: match = inRange(z0) && inRange(z1); break;
  }
  if (!match) throw CaseMismatch("coefficient pattern does not match case " + std::to_string(caseId));
  if (classifyIsochronicity(sys).verdict != Verdict::NotIsochronous)
    throw PreconditionViolated("system is isochronous");

  const auto atyp = atypicalValues(sys);
  std::vector<Complex> nonzeroAtyp;
  for (const auto& v : atyp)
    if (std::abs(v) > 1e-9) nonzeroAtyp.push_back(v);
  if (nonzeroAtyp.empty()) throw PreconditionViolated("no nonzero atypical value to encircle");
  const Complex target = *std::min_element(nonzeroAtyp.begin(), nonzeroAtyp.end(),
                                           [](Complex p, Complex q) { return std::abs(p) < std::abs(q); });
  const double d0 = std::abs(target);
  double gap = d0;
  for (const auto& v : atyp)
    if (std::abs(v - target) > 1e-9) gap = std::min(gap, std::abs(v - target));
  const double radius = 0.25 * d0;
  const double around = 0.4 * gap;
  const double psi = std::arg(target);
  const double phi = psi + 0.3;

  MonodromyReport rep;
  rep.caseId = caseId;
  rep.baseH = std::polar(radius, phi);
  rep.encircledValue = target;

  // rho': back along the arc to the ray through the target, out, once around it, and back.
  HPath out;
  for (int k = 0; k <= 16; ++k) out.waypoints.push_back(std::polar(radius, phi + (psi - phi) * k / 16));
  const Complex near = std::polar(d0 - around, psi);
  out.waypoints.push_back(near);
  const HPath ring = circlePath(target, near, 256);
  out.waypoints.insert(out.waypoints.end(), ring.waypoints.begin() + 1, ring.waypoints.end());
  for (int k = 16; k >= 0; --k) out.waypoints.push_back(std::polar(radius, phi + (psi - phi) * k / 16));
  annotateWinding(out, atyp);
  HPath aroundZero = circlePath(0.0, rep.baseH, 256);
  annotateWinding(aroundZero, atyp);

  const FiberLoop gamma = liftOriginLoop(sys, rep.baseH);
  rep.periodGamma = period(gamma).T;
  Complex coefficient = rep.periodGamma;

  // One representative per family of cycles vanishing over 0; within a family the periods agree.
  const auto extra = l0ExtraCriticalPoints(sys);
  auto addSaddle = [&](bool onX) {
    for (const auto& s : extra) {
      if ((s.y == Complex{}) != onX || s.hessianRank != 2) continue;
      const Complex t = period(liftSaddleLoop(sys, rep.baseH, s)).T;
      rep.saddlePeriods.push_back(t);
      coefficient += t;
      return;
    }
  };
  auto addInfinity = [&](bool px, int N) {
    InfinitePoint P;
    P.isPx = px;
    P.isPy = !px;
    P.beta = px ? 1.0 : 0.0;
    P.alpha = px ? 0.0 : 1.0;
    P.multiplicity = N;
    const auto loops = liftInfinityCycles(sys, rep.baseH, P);
    const Complex t0 = period(loops[0]).T, t1 = period(loops[1]).T;
    rep.infinityPeriods.push_back(t0);
    rep.infinityPeriods.push_back(t1);
    coefficient += t0 + t1;
  };
  if (caseId == 2 || caseId == 3 || caseId == 4) {
    if (z0 == 1) addSaddle(true);
    if (z1 == 1) addSaddle(false);
  }
  if (caseId == 4 || caseId == 5) {
    if (inRange(z0)) addInfinity(true, z0);
    if (inRange(z1)) addInfinity(false, z1);
  }
  rep.predictedCoefficient = coefficient;
  rep.asymptoticCoefficient = predictedAsymptotic(caseId, n, inRange(z0) ? z0 : 0, inRange(z1) ? z1 : 0);

  const FiberLoop delta = continueLoop(sys, gamma, out);
  rep.periodDelta = period(delta).T;
  const FiberLoop after = continueLoop(sys, delta, aroundZero);
  rep.periodAfter = period(after).T;
  rep.shift = rep.periodAfter - rep.periodDelta;
  const Complex ratio = rep.shift / (-coefficient);
  rep.mReal = ratio.real();
  rep.m = std::lround(rep.mReal);
  rep.roundingResidual = std::abs(ratio - static_cast<double>(rep.m));
  rep.onLattice = rep.roundingResidual < 1e-6;
  rep.nonzero = rep.m != 0;
  return rep;
}

int scanThreadCount() {
  if (const char* env = std::getenv("ISOCHRON_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

PeriodScanResult periodScan(const SystemC& sys, const std::vector<Complex>& hGrid, int samples) {
  const auto atyp = atypicalValues(sys);
  const int count = static_cast<int>(hGrid.size());
  std::vector<std::optional<PeriodSample>> results(count);
  std::vector<std::string> errors(count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      const Complex h = hGrid[i];
      try {
        if (h == Complex{} || isAtypical(h, atyp)) throw PreconditionViolated("h is an atypical value");
        const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
        FiberLoop loop = liftInLinearChart(sys, h, 0.0, {0.0, 0.0}, id, samples, std::sqrt(std::abs(h)));
        results[i] = period(loop);
      } catch (const Error& e) {
        errors[i] = "h=" + formatComplex(h) + ": " + e.what();
      }
    }
  };
  const int threads = std::min(scanThreadCount(), std::max(1, count));
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  PeriodScanResult res;
  for (int i = 0; i < count; ++i) {
    if (results[i]) {
      res.statistic = std::max(res.statistic, std::abs(results[i]->T - kTwoPiI));
      res.samples.push_back(*results[i]);
    } else {
      res.errors.push_back(errors[i]);
    }
  }
  return res;
}

}  // namespace isochron
