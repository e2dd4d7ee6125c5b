#include <doctest.h>

#include <cstdlib>
#include <random>

#include "isochron/cycles.hpp"
#include "isochron/errors.hpp"
#include "isochron/univariate.hpp"

using namespace isochron;

namespace {

// Period of the origin loop by an independent route: x runs over |x| = r and y is the root of
// H(x, .) = h followed by continuity from the branch y ~ h / x.
Complex periodOnCircle(const SystemC& s, Complex h, double r, int samples = 4096) {
  const int d = s.n + 1;
  Complex sum{};
  Complex y{};
  for (int k = 0; k < samples; ++k) {
    const Complex x = std::polar(r, 2.0 * kPi * k / samples);
    DensePoly<Complex> c(d + 1, Complex{});
    for (int j = 0; j <= d; ++j) c[j] = s.a[j] * std::pow(x, d - j);
    c[1] += x;
    c[0] -= h;
    while (std::abs(c.back()) == 0.0) c.pop_back();
    const Complex guess = k == 0 ? h / x : y;
    Complex best{};
    for (const auto& root : aberthRoots(c))
      if (best == Complex{} || std::abs(root - guess) < std::abs(best - guess)) best = root;
    y = best;
    Complex hy = x;
    for (int j = 1; j <= d; ++j) hy += s.a[j] * double(j) * std::pow(x, d - j) * std::pow(y, j - 1);
    sum += Complex{0.0, 1.0} * x / hy;
  }
  return sum * (2.0 * kPi / samples);
}

Complex finiteDifferencePeriod(const FiberLoop& loop) {
  const int m = loop.size();
  Complex sum{};
  for (int k = 0; k < m; ++k) {
    const auto& p = loop.samples[k];
    const auto& nx = loop.samples[k + 1];
    const auto& px = loop.samples[(k + m - 1) % m];
    const Complex dx = 0.5 * (nx.x - px.x);
    Complex hy = p.x;
    for (int j = 1; j <= loop.system.n + 1; ++j)
      hy += loop.system.a[j] * double(j) * std::pow(p.x, loop.system.n + 1 - j) * std::pow(p.y, j - 1);
    sum += dx / hy;
  }
  return sum;
}

}  // namespace

TEST_CASE("origin loop of xy has period 2 pi i") {
  const SystemC s(2, {0, 0, 0, 0});
  for (Complex h : {Complex{0.01}, Complex{-0.003, 0.02}, Complex{1.0, 1.0}}) {
    const auto loop = liftOriginLoop(s, h);
    CHECK(loop.maxResidual() < 1e-12);
    CHECK(std::abs(loop.samples.front().x - loop.samples.back().x) == 0.0);
    const auto p = period(loop);
    CHECK(std::abs(p.T - kTwoPiI) < 1e-12);
    CHECK(p.quadratureError < 1e-9);
  }
}

TEST_CASE("origin loop samples lie on the fiber") {
  const SystemC s(2, {0, 0, 1, 1});
  const auto loop = liftOriginLoop(s, 0.01);
  CHECK(loop.size() == kDefaultSamples);
  CHECK(loop.maxResidual() < 1e-10);
  CHECK(loop.minGradient() > 0.0);
  CHECK(std::abs(period(loop).T - kTwoPiI) < 1e-9);
}

TEST_CASE("mixed period matches root tracking on a circle") {
  const SystemC s(2, {1, 0, 0, 1});
  const Complex h{0.004, 0.001};
  const Complex t = period(liftOriginLoop(s, h)).T;
  const Complex oracle = periodOnCircle(s, h, std::sqrt(std::abs(h)));
  CHECK(std::abs(t - oracle) < 1e-8);
  CHECK(std::abs(t - kTwoPiI) > 1e-4);
}

TEST_CASE("quadrature does not depend on the sample count once resolved") {
  const SystemC s(3, {0, 1, 0, 0, 1});
  const Complex h{0.002, -0.001};
  const Complex a = period(liftOriginLoop(s, h, 256)).T;
  const Complex b = period(liftOriginLoop(s, h, 1024)).T;
  CHECK(std::abs(a - b) < 1e-9);
}

TEST_CASE("atypical levels are rejected") {
  const SystemC s(2, {1, 0, 0, 1});
  CHECK_THROWS_AS(liftOriginLoop(s, 0.0), PreconditionViolated);
  CHECK_THROWS_AS(liftOriginLoop(s, 1.0 / 27.0), PreconditionViolated);
  CHECK_THROWS_AS(liftOriginLoop(s, 0.01, 4), PreconditionViolated);
}

TEST_CASE("saddle loop tends to pi i") {
  const SystemC s(3, {0, 1, 0, 0, 1});
  const auto extra = l0ExtraCriticalPoints(s);
  const CriticalPoint* saddle = nullptr;
  for (const auto& p : extra)
    if (std::abs(p.x - Complex{0, 1}) < 1e-9 && std::abs(p.y) < 1e-9) saddle = &p;
  REQUIRE(saddle);
  const Complex piI{0.0, kPi};
  const auto l3 = liftSaddleLoop(s, 1e-3, *saddle);
  const auto l4 = liftSaddleLoop(s, 1e-4, *saddle);
  CHECK(l3.anchor.kind == LoopAnchor::Kind::Saddle);
  const double e3 = std::abs(period(l3).T - piI), e4 = std::abs(period(l4).T - piI);
  CHECK(period(l3).T.imag() > 0.0);
  CHECK(e3 < 1e-2);
  CHECK(e4 < e3);
  CHECK_THROWS_AS(liftSaddleLoop(s, 1e-3, CriticalPoint{0.0, 0.0, 0.0}), PreconditionViolated);
}

TEST_CASE("infinity cycles on the exceptional divisor") {
  // y^3 (x^4 + y^4) with N = 3 at P_x.
  const SystemC s(6, {0, 0, 0, 1, 0, 0, 0, 1});
  InfinitePoint px;
  px.isPx = true;
  px.beta = 1.0;
  px.multiplicity = 3;
  const auto loops = liftInfinityCycles(s, 1e-3, px, 4096);
  REQUIRE(loops.size() == 3);
  for (const auto& l : loops) {
    CHECK(l.maxResidual() < 1e-9);
    const Complex t = period(l).T;
    CHECK(std::abs(t - finiteDifferencePeriod(l)) < 1e-4);
    CHECK(t.imag() > 0.0);
  }
  CHECK(std::abs(period(loops[0]).T - kTwoPiI) < 1e-2);

  InfinitePoint wrong = px;
  wrong.multiplicity = 1;
  CHECK_THROWS_AS(liftInfinityCycles(s, 1e-3, wrong), PreconditionViolated);
  CHECK_THROWS_AS(liftInfinityCycles(SystemC(2, {0, 0, 1, 1}), 1e-3, px), PreconditionViolated);
}

TEST_CASE("paths and winding numbers") {
  const HPath c = circlePath(0.0, 0.5, 64);
  CHECK(c.waypoints.size() == 65);
  CHECK(std::abs(c.length() - kPi) < 1e-2);
  HPath w = c;
  annotateWinding(w, {0.0, 2.0});
  REQUIRE(w.encircles.size() == 1);
  CHECK(w.encircles[0].value == 0.0);
  CHECK(w.encircles[0].winding == 1);
  CHECK(std::abs(pathClearance(c, {0.0}) - 0.5) < 1e-3);
  CHECK(defaultClearance({0.0, 1.0}) == doctest::Approx(0.1));
}

TEST_CASE("continuation along a contractible loop returns the same period") {
  const SystemC s(2, {1, 0, 0, 1});
  const Complex h0{0.004, 0.003};
  const auto g = liftOriginLoop(s, h0);
  const auto c = continueLoop(s, g, circlePath(h0 + Complex{0.002, 0.0}, h0, 64));
  CHECK(c.anchor.kind == LoopAnchor::Kind::Continued);
  CHECK(c.maxResidual() < 1e-10);
  CHECK(std::abs(period(c).T - period(g).T) < 1e-8);
}

TEST_CASE("continuation around the origin of an isochronous system keeps 2 pi i") {
  const SystemC s(2, {0, 0, 1, 1});
  const Complex h0{0.12, 0.0};
  const auto c = continueLoop(s, liftOriginLoop(s, h0), circlePath(0.0, h0, 128));
  CHECK(std::abs(period(c).T - kTwoPiI) < 1e-8);
}

TEST_CASE("continuation refuses paths through atypical values") {
  const SystemC s(2, {1, 0, 0, 1});
  const auto g = liftOriginLoop(s, 0.01);
  HPath p;
  p.waypoints = {0.01, 1.0 / 27.0, 0.05};
  CHECK_THROWS_AS(continueLoop(s, g, p), PreconditionViolated);
  p.waypoints = {0.03};
  CHECK_THROWS_AS(continueLoop(s, g, p), PreconditionViolated);
}

TEST_CASE("monodromy of case 1 lands on the lattice") {
  const auto r = monodromyLatticeCheck(SystemC(2, {1, 0, 0, 1}), 1);
  CHECK(r.onLattice);
  CHECK(r.nonzero);
  CHECK(r.roundingResidual < 1e-6);
  CHECK(std::abs(r.shift + double(r.m) * r.predictedCoefficient) < 1e-6 * std::abs(r.shift));
  CHECK_THROWS_AS(monodromyLatticeCheck(SystemC(2, {1, 0, 0, 1}), 3), CaseMismatch);
  CHECK_THROWS_AS(monodromyLatticeCheck(SystemC(2, {0, 0, 1, 1}), 1), CaseMismatch);
}

TEST_CASE("period scan statistics") {
  std::vector<Complex> grid;
  for (int k = 0; k < 8; ++k) grid.push_back(std::polar(1e-3 * std::pow(10.0, k / 7.0), 0.7 * k));
  CHECK(periodScan(SystemC(2, {0, 0, 0, 0}), grid).statistic < 1e-12);
  CHECK(periodScan(SystemC(3, {0, 0, 0, 1, 1}), grid).statistic < 1e-8);
  CHECK(periodScan(SystemC(3, {1, 1, 0, 0, 0}), grid).statistic < 1e-8);
  const auto mixed = periodScan(SystemC(2, {1, 0, 0, 1}), grid);
  CHECK(mixed.errors.empty());
  CHECK(mixed.statistic > 1e-4);

  auto bad = grid;
  bad.push_back(0.0);
  const auto withError = periodScan(SystemC(2, {1, 0, 0, 1}), bad);
  CHECK(withError.errors.size() == 1);
  CHECK(withError.samples.size() == grid.size());
}

TEST_CASE("period scan does not depend on the thread count") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  std::vector<Complex> grid;
  for (int k = 0; k < 24; ++k) grid.push_back({u(rng), u(rng)});
  const SystemC s(3, {0.5, 1, 0, 0.3, 1});
  setenv("ISOCHRON_THREADS", "1", 1);
  CHECK(scanThreadCount() == 1);
  const auto one = periodScan(s, grid);
  setenv("ISOCHRON_THREADS", "4", 1);
  CHECK(scanThreadCount() == 4);
  const auto four = periodScan(s, grid);
  unsetenv("ISOCHRON_THREADS");
  REQUIRE(one.samples.size() == four.samples.size());
  for (size_t i = 0; i < one.samples.size(); ++i) {
    CHECK(one.samples[i].h == four.samples[i].h);
    CHECK(one.samples[i].T == four.samples[i].T);
  }
  CHECK(one.errors == four.errors);
}
