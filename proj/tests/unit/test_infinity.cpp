#include <doctest.h>

#include <random>

#include "isochron/infinity.hpp"
#include "isochron/resultant.hpp"

using namespace isochron;

namespace {

using Q = GaussianRational;

SystemQ sysQ(int n, std::vector<long> a) {
  std::vector<Q> c;
  for (long v : a) c.emplace_back(v);
  return {n, c};
}

bool sameProjective(const InfinitePoint& p, Complex beta, Complex alpha) {
  return std::abs(p.beta * alpha - p.alpha * beta) < 1e-9;
}

const InfinitePoint* findPx(const std::vector<InfinitePoint>& pts) {
  for (const auto& p : pts)
    if (p.isPx) return &p;
  return nullptr;
}

// Winding number of x -> D(h, x) on |x| = R, using the pointwise Sylvester determinant.
int windingDegree(const HBivarPoly<Complex>& level, Complex h, double radius, int samples = 4096) {
  double total = 0.0;
  Complex prev = discriminantAt(level, h, radius);
  for (int k = 1; k <= samples; ++k) {
    const Complex cur = discriminantAt(level, h, std::polar(radius, 2.0 * kPi * k / samples));
    total += std::arg(cur / prev);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2.0 * kPi)));
}

SystemC withSupport(std::mt19937_64& rng, int n, const std::vector<int>& support) {
  std::normal_distribution<double> g;
  std::vector<Complex> a(n + 2);
  for (int j : support) a[j] = {1.0 + std::abs(g(rng)), g(rng)};
  return {n, a};
}

}  // namespace

TEST_CASE("points at infinity") {
  auto pts = pointsAtInfinity(sysQ(2, {0, 0, 1, 1}));
  REQUIRE(pts.size() == 2);
  REQUIRE(findPx(pts));
  CHECK(findPx(pts)->multiplicity == 2);
  const auto& other = pts[0].isPx ? pts[1] : pts[0];
  CHECK(sameProjective(other, -1.0, 1.0));
  CHECK(other.multiplicity == 1);

  pts = pointsAtInfinity(sysQ(4, {0, 0, 1, 0, 0, 1}));
  REQUIRE(pts.size() == 4);
  CHECK(findPx(pts)->multiplicity == 2);
  for (const auto& p : pts)
    if (!p.isPx) {
      CHECK(p.multiplicity == 1);
      CHECK(std::abs(std::pow(p.slope(), 3) + 1.0) < 1e-12);
    }

  pts = pointsAtInfinity(sysQ(3, {0, 0, 1, 0, 0}));
  REQUIRE(pts.size() == 2);
  for (const auto& p : pts) {
    CHECK(p.multiplicity == 2);
    CHECK((p.isPx || p.isPy));
  }
  CHECK_THROWS_AS(pointsAtInfinity(sysQ(3, {0, 0, 0, 0, 0})), LinearSystem);
}

TEST_CASE("multiplicities at infinity sum to n+1") {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution keep(0.5);
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + t % 7;
    std::vector<int> support;
    for (int j = 0; j <= n + 1; ++j)
      if (keep(rng)) support.push_back(j);
    if (support.empty()) continue;
    const auto sys = withSupport(rng, n, support);
    int total = 0;
    for (const auto& p : pointsAtInfinity(sys)) total += p.multiplicity;
    CHECK(total == n + 1);
  }
}

TEST_CASE("Newton polygon of Y^2 + XY + X^3") {
  BivarPolyQ f = BivarPolyQ::monomial(0, 2) + BivarPolyQ::monomial(1, 1) + BivarPolyQ::monomial(3, 0);
  const auto poly = newtonPolygon(f);
  REQUIRE(poly.segments.size() == 2);
  CHECK(poly.segments[0].from == Exponent{0, 2});
  CHECK(poly.segments[0].to == Exponent{1, 1});
  CHECK(poly.segments[0].slope() == -1.0);
  CHECK(poly.segments[1].to == Exponent{3, 0});
  CHECK(poly.segments[1].slope() == -0.5);
  CHECK_THROWS_AS(newtonPolygon(BivarPolyQ{}), EmptyCarrier);
}

TEST_CASE("condition-I chart at P_x has the two-segment polygon") {
  for (auto [n, N] : {std::pair{4, 3}, std::pair{6, 4}, std::pair{5, 4}}) {
    std::vector<Complex> a(n + 2);
    a[N] = 1.0;
    a[n + 1] = {0.5, -0.25};
    const SystemC sys(n, a);
    const auto chart = chartAt(sys, {0.02, 0.01}, *findPx(pointsAtInfinity(sys)));
    const auto poly = newtonPolygon(chart.f);
    REQUIRE(poly.segments.size() == 2);
    CHECK(poly.segments[0].from == Exponent{0, N});
    CHECK(poly.segments[0].to == Exponent{n - 1, 1});
    CHECK(poly.segments[1].to == Exponent{n + 1, 0});
    CHECK(poly.segments[0].slope() < poly.segments[1].slope());

    // At h = 0 the non-axis component Y^(N-1)(...) + X^(n-1) has the single segment (0,N-1)-(n-1,0).
    const auto chart0 = chartAt(sys, 0.0, *findPx(pointsAtInfinity(sys)));
    BivarPolyC second;
    for (const auto& [e, c] : chart0.f.terms()) second.add(e.first, e.second - 1, c);
    const auto poly0 = newtonPolygon(second);
    REQUIRE(poly0.segments.size() == 1);
    CHECK(poly0.segments[0].from == Exponent{0, N - 1});
    CHECK(poly0.segments[0].to == Exponent{n - 1, 0});
  }
}

TEST_CASE("Puiseux branch of the cusp") {
  const BivarPolyC f = BivarPolyC::monomial(0, 2) - BivarPolyC::monomial(3, 0);
  const auto br = puiseuxBranches(f, 6);
  REQUIRE(br.size() == 1);
  CHECK(br[0].xExponent == 2);
  CHECK(br[0].yValuation == 3);
  CHECK(std::abs(br[0].yLeading - 1.0) < 1e-14);
  for (std::size_t i = 1; i < br[0].ySeries.size(); ++i) CHECK(std::abs(br[0].ySeries[i]) < 1e-14);
}

TEST_CASE("the slope -1/2 branch at P_x for condition I") {
  // F = X^2 Y + Y^3 + a Y^4 - h X^4 (n = 3, N = 3). With X = s, Y = s^2 D:
  // D = h - a_3 h^3 s^(2N-n-1) + ..., so d_0 = h and d_2 = -h^3.
  const Complex h(0.03, -0.02);
  const SystemC sys(3, {0.0, 0.0, 0.0, 1.0, 0.7});
  const auto res = residueAtInfinity(sys, h, *findPx(pointsAtInfinity(sys)));
  const BranchResidue* slopeHalf = nullptr;
  for (const auto& r : res)
    if (r.branch.xExponent == 1 && r.branch.yValuation == 2) slopeHalf = &r;
  REQUIRE(slopeHalf);
  CHECK(std::abs(slopeHalf->branch.yLeading - h) < 1e-15);
  CHECK(std::abs(slopeHalf->branch.ySeries[1]) < 1e-15);
  CHECK(std::abs(slopeHalf->branch.ySeries[2] + h * h * h) < 1e-15);
  CHECK(std::abs(slopeHalf->residue + 1.0) < 1e-10);
}

TEST_CASE("residues of xy") {
  const SystemC sys(2, {0.0, 0.0, 0.0, 0.0});
  const InfinitePoint px{1.0, 0.0, 1, true, false}, py{0.0, 1.0, 1, false, true};
  const Complex h(0.4, 0.1);
  auto cx = chartAt(sys, h, px);
  auto bx = puiseuxBranches(cx.f, 4);
  REQUIRE(bx.size() == 1);
  CHECK(std::abs(residueOnBranch(cx, bx[0]) + 1.0) < 1e-14);
  auto cy = chartAt(sys, h, py);
  auto by = puiseuxBranches(cy.f, 4);
  REQUIRE(by.size() == 1);
  CHECK(std::abs(residueOnBranch(cy, by[0]) - 1.0) < 1e-14);
}

TEST_CASE("residues: condition I, condition II, mixed") {
  std::mt19937_64 rng(12);
  std::normal_distribution<double> g;
  for (int n = 2; n <= 6; ++n) {
    for (int t = 0; t < 3; ++t) {
      const Complex h = 0.05 * Complex(g(rng), g(rng));
      // Condition I: lowest nonzero index above (n+1)/2.
      std::vector<int> one, two, mixed{0, n + 1};
      for (int j = (n + 1) / 2 + 1; j <= n + 1; ++j) one.push_back(j);
      for (int j = 0; 2 * j < n + 1; ++j) two.push_back(j);
      for (int j = 1; j <= n; ++j)
        if (2 * j != n + 1) mixed.push_back(j);
      for (const auto& [support, kind] :
           {std::pair{one, 1}, std::pair{two, 2}, std::pair{mixed, 3}}) {
        const auto sys = withSupport(rng, n, support);
        Complex total = 0.0;
        int unitCount = 0;
        for (const auto& p : pointsAtInfinity(sys)) {
          const auto chart = chartAt(sys, h, p);
          for (const auto& r : residueAtInfinity(sys, h, p)) {
            total += r.residue;
            CHECK(std::abs(r.residue - residueByContour(chart, r.branch)) < 1e-8);
            if (kind == 3) CHECK(std::abs(r.residue) < 1e-9);
            if (r.branch.xExponent == 1 && r.branch.yValuation == 2 && (p.isPx || p.isPy)) {
              ++unitCount;
              CHECK(std::abs(r.residue - (p.isPx ? -1.0 : 1.0)) < 1e-10);
            }
            for (const auto& c : branchResidual(chart.f, r.branch)) CHECK(std::abs(c) < 1e-10);
          }
        }
        CHECK(std::abs(total) < 1e-9);
        if (kind != 3) CHECK(unitCount == 1);
      }
    }
  }
}

TEST_CASE("lambda index") {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<long> num(-50, 50);
  const auto cubic = sysQ(2, {1, 0, 0, 1});
  const auto quintic = sysQ(4, {0, 0, 1, 0, 0, 1});
  CHECK(lambdaIndex(cubic, Q(0)) == 0);
  for (int t = 0; t < 5; ++t) {
    const Q h(mpq_class(num(rng), 17), mpq_class(num(rng) | 1, 13));
    CHECK(lambdaIndex(cubic, h) == 0);
    CHECK(lambdaIndex(quintic, h) == 0);
  }
  CHECK(lambdaIndex(quintic, Q(0)) > 0);
  CHECK(lambdaIndex(sysQ(2, {0, 0, 0, 0}), Q(0)) == 0);
}

TEST_CASE("lambda index agrees with a winding-number count") {
  const auto sys = sysQ(4, {0, 0, 1, 0, 0, 1});
  const auto level = HBivarPoly<Complex>::levelSet(buildH(sys).cast<Complex>());
  // All finite ramification points have |x| < 10 at these levels.
  const int generic = windingDegree(level, {0.37, 0.11}, 50.0);
  const int special = windingDegree(level, 0.0, 50.0);
  CHECK(generic - special == lambdaIndex(sys, Q(0)));
  CHECK(generic - special == 1);
}

TEST_CASE("lambda localizes at P_x") {
  const auto sys = sysQ(4, {0, 0, 1, 0, 0, 1});
  int total = 0;
  for (const auto& p : pointsAtInfinity(sys)) {
    const int at = lambdaIndexAtPoint(sys, Q(0), p);
    if (!p.isPx) CHECK(at == 0);
    if (p.isPx) CHECK(at > 0);
    total += at;
  }
  CHECK(total == lambdaIndex(sys, Q(0)));
  for (const auto& p : pointsAtInfinity(sys)) CHECK(lambdaIndexAtPoint(sys, Q(mpq_class(1, 3)), p) == 0);
}

TEST_CASE("lambda at P_x vanishes for condition I and II at h = 0") {
  for (const auto& sys : {sysQ(4, {0, 0, 0, 1, 0, 2}), sysQ(3, {0, 0, 0, 1, 1}), sysQ(5, {0, 0, 0, 0, 1, -1, 1})}) {
    const auto pts = pointsAtInfinity(sys);
    CHECK(lambdaIndexAtPoint(sys, Q(0), *findPx(pts)) == 0);
    int total = 0;
    for (const auto& p : pts) total += lambdaIndexAtPoint(sys, Q(0), p);
    CHECK(total == lambdaIndex(sys, Q(0)));
  }
  // Condition II mirrors to P_y.
  const auto two = sysQ(4, {2, 0, 1, 0, 0, 0});
  for (const auto& p : pointsAtInfinity(two))
    if (p.isPy) CHECK(lambdaIndexAtPoint(two, Q(0), p) == 0);
}

TEST_CASE("mixed systems with a multiple y-factor carry lambda at P_x") {
  // n = 6, H_7 = y^2 (x^5 + y^5) and y^3 (x^4 + y^4): 1 < N < (n+1)/2, P_y absent.
  for (int N : {2, 3}) {
    std::vector<long> a(8, 0);
    a[N] = 1;
    a[7] = 1;
    const auto sys = sysQ(6, a);
    const int global = lambdaIndex(sys, Q(0));
    CHECK(global > 0);
    int total = 0;
    for (const auto& p : pointsAtInfinity(sys)) {
      const int at = lambdaIndexAtPoint(sys, Q(0), p);
      if (p.isPx) CHECK(at == global);
      total += at;
    }
    CHECK(total == global);
  }
}
