// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "isochron/cycles.hpp"
#include "isochron/infinity.hpp"
#include "isochron/resultant.hpp"

using namespace isochron;

namespace {

using Q = GaussianRational;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string fmt(Complex z) { return "(" + fmt(z.real()) + (z.imag() < 0 ? "" : "+") + fmt(z.imag()) + "i)"; }

enum class DrawClass { ConditionI, ConditionII, Mixed };

// Coefficient size per degree: large enough that mixed periods visibly deviate from 2 pi i,
// small enough that |h| <= 0.1 stays inside the region where the origin loop exists.
double scanScale(int n) {
  static const double scale[] = {0.0, 0.0, 0.1, 0.15, 0.3, 1.0, 2.0};
  return scale[n];
}

SystemC draw(std::mt19937_64& rng, int n, DrawClass kind, double scale) {
  std::normal_distribution<double> g;
  std::vector<Complex> a(n + 2);
  for (int j = 0; j <= n + 1; ++j) {
    const bool zero = kind == DrawClass::ConditionI ? 2 * j <= n + 1
                      : kind == DrawClass::ConditionII ? 2 * j >= n + 1
                                                       : false;
    if (!zero) a[j] = scale * Complex(g(rng), g(rng));
  }
  return {n, a};
}

std::vector<Complex> hGrid(std::mt19937_64& rng, int count) {
  std::uniform_real_distribution<double> arg(0.0, 2.0 * kPi);
  std::vector<Complex> out;
  for (int k = 0; k < count; ++k) out.push_back(std::polar(std::pow(10.0, -3.0 + 2.0 * k / (count - 1)), arg(rng)));
  return out;
}

double distanceToNearest(Complex h, const std::vector<Complex>& values) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& v : values) d = std::min(d, std::abs(h - v));
  return d;
}

bool isochronous(Verdict v) { return v != Verdict::NotIsochronous; }

// Criteria 1 and 2 share the same scans.
struct ScanSummary {
  int draws = 0, mismatches = 0, scanErrors = 0;
  double worstIsochronous = 0.0, weakestMixed = std::numeric_limits<double>::infinity();
  double seconds = 0.0;
  std::string firstProblem;
};

const ScanSummary& classificationScans() {
  static ScanSummary s = [] {
    ScanSummary out;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20240601);
    for (int n = 2; n <= 6; ++n) {
      for (DrawClass kind : {DrawClass::ConditionI, DrawClass::ConditionII, DrawClass::Mixed}) {
        for (int d = 0; d < 50; ++d) {
          const SystemC sys = draw(rng, n, kind, scanScale(n));
          const auto grid = hGrid(rng, 20);
          const auto res = periodScan(sys, grid);
          const bool predicted = isochronous(classifyIsochronicity(sys).verdict);
          ++out.draws;
          out.scanErrors += static_cast<int>(res.errors.size());
          if (!res.errors.empty() && out.firstProblem.empty()) out.firstProblem = res.errors.front();
          bool measured;
          if (predicted) {
            out.worstIsochronous = std::max(out.worstIsochronous, res.statistic);
            measured = res.statistic < 1e-8;
          } else {
            out.weakestMixed = std::min(out.weakestMixed, res.statistic);
            measured = !(res.statistic > 1e-4);
          }
          if (predicted != measured || !res.errors.empty()) {
            ++out.mismatches;
            if (out.firstProblem.empty())
              out.firstProblem = "n=" + std::to_string(n) + " statistic " + fmt(res.statistic);
          }
        }
      }
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }();
  return s;
}

Outcome classificationRoundTrip() {
  const auto& s = classificationScans();
  Outcome o;
  o.pass = s.mismatches == 0 && s.scanErrors == 0 && s.seconds < 600.0;
  o.detail = std::to_string(s.draws) + " draws, " + std::to_string(s.mismatches) + " mismatches, " +
             std::to_string(s.scanErrors) + " scan errors, max isochronous statistic " + fmt(s.worstIsochronous) +
             ", min mixed statistic " + fmt(s.weakestMixed) + ", " + fmt(s.seconds) + " s";
  if (!s.firstProblem.empty()) o.detail += "; first problem: " + s.firstProblem;
  return o;
}

Outcome constantValue() {
  const auto& s = classificationScans();
  Outcome o;
  o.pass = s.worstIsochronous < 1e-8 && s.scanErrors == 0;
  o.detail = "max |T - 2 pi i| over isochronous draws " + fmt(s.worstIsochronous);
  return o;
}

Outcome saddleAsymptotics() {
  const SystemC sys(3, {0, 1, 0, 0, 1});
  const CriticalPoint* saddle = nullptr;
  const auto extra = l0ExtraCriticalPoints(sys);
  for (const auto& p : extra)
    if (std::abs(p.x - Complex{0, 1}) < 1e-9 && std::abs(p.y) < 1e-9) saddle = &p;
  if (!saddle) return {false, "saddle (i, 0) not found"};
  const Complex piI{0.0, kPi};
  const Complex t3 = period(liftSaddleLoop(sys, 1e-3, *saddle)).T;
  const Complex t4 = period(liftSaddleLoop(sys, 1e-4, *saddle)).T;
  const double e3 = std::abs(t3 - piI), e4 = std::abs(t4 - piI);
  return {e3 < 1e-2 && e4 < e3, "|T - pi i| = " + fmt(e3) + " at 1e-3, " + fmt(e4) + " at 1e-4"};
}

Outcome residueCertificate() {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  double worstUnit = 0.0, worstMixed = 0.0;
  int unitBranches = 0, mixedBranches = 0, missing = 0;
  for (int n = 2; n <= 6; ++n) {
    for (int d = 0; d < 3; ++d) {
      const SystemC one = draw(rng, n, DrawClass::ConditionI, 1.0);
      const Complex h = 0.05 * Complex(g(rng), g(rng));
      int found = 0;
      for (const auto& p : pointsAtInfinity(one)) {
        if (!p.isPx) continue;
        for (const auto& r : residueAtInfinity(one, h, p))
          if (r.branch.xExponent == 1 && r.branch.yValuation == 2) {
            ++found;
            worstUnit = std::max(worstUnit, std::abs(r.residue + 1.0));
          }
      }
      unitBranches += found;
      if (found != 1) ++missing;

      const SystemC mixed = draw(rng, n, DrawClass::Mixed, 1.0);
      const auto atyp = atypicalValues(mixed);
      for (int t = 0; t < 5; ++t) {
        Complex hv;
        do {
          hv = 0.3 * Complex(g(rng), g(rng));
        } while (distanceToNearest(hv, atyp) < 1e-3);
        for (const auto& p : pointsAtInfinity(mixed))
          for (const auto& r : residueAtInfinity(mixed, hv, p)) {
            ++mixedBranches;
            worstMixed = std::max(worstMixed, std::abs(r.residue));
          }
      }
    }
  }
  Outcome o;
  o.pass = missing == 0 && worstUnit < 1e-10 && worstMixed < 1e-9 && mixedBranches > 0;
  o.detail = std::to_string(unitBranches) + " condition-I branches, max |res + 1| " + fmt(worstUnit) + "; " +
             std::to_string(mixedBranches) + " mixed branches, max |res| " + fmt(worstMixed);
  return o;
}

Outcome lambdaCriterion() {
  const SystemQ sys(4, {0, 0, 1, 0, 0, 1});
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<long> num(-40, 40);
  bool ok = true;
  std::ostringstream os;
  for (int t = 0; t < 5; ++t) {
    const Q h(mpq_class(num(rng) | 1, 11), mpq_class(num(rng), 7));
    const int l = lambdaIndex(sys, h);
    ok = ok && l == 0;
    if (l != 0) os << "lambda=" << l << " at a generic h; ";
  }
  const int global = lambdaIndex(sys, Q(0));
  ok = ok && global > 0;
  int total = 0;
  for (const auto& p : pointsAtInfinity(sys)) {
    const int at = lambdaIndexAtPoint(sys, Q(0), p);
    total += at;
    if (!p.isPx && at != 0) {
      ok = false;
      os << "nonzero lambda away from P_x; ";
    }
    if (p.isPx && at == 0) {
      ok = false;
      os << "lambda vanishes at P_x; ";
    }
  }
  ok = ok && total == global;
  os << "lambda(0)=" << global << ", sum over points=" << total;
  return {ok, os.str()};
}

Outcome infinityCycles() {
  const SystemC sys(6, {0, 0, 0, 1, 0, 0, 0, 1});
  InfinitePoint px;
  for (const auto& p : pointsAtInfinity(sys))
    if (p.isPx) px = p;
  const Complex twoPiI = kTwoPiI, piI{0.0, kPi};
  auto errors = [&](double h, std::vector<Complex>& periods) {
    periods.clear();
    for (const auto& l : liftInfinityCycles(sys, h, px)) periods.push_back(period(l).T);
    // Best assignment of one loop to 2 pi i and the others to pi i.
    std::vector<double> best;
    double bestMax = std::numeric_limits<double>::infinity();
    for (size_t pick = 0; pick < periods.size(); ++pick) {
      std::vector<double> e;
      for (size_t i = 0; i < periods.size(); ++i) e.push_back(std::abs(periods[i] - (i == pick ? twoPiI : piI)));
      const double m = *std::max_element(e.begin(), e.end());
      if (m < bestMax) {
        bestMax = m;
        best = e;
      }
    }
    return best;
  };
  std::vector<Complex> p3, p4;
  const auto e3 = errors(1e-3, p3);
  const auto e4 = errors(1e-4, p4);
  bool ok = p3.size() == 3 && p4.size() == 3;
  for (size_t i = 0; ok && i < e3.size(); ++i) ok = e3[i] < 1e-2 && e4[i] < e3[i];
  std::ostringstream os;
  os << p3.size() << " loops; periods at 1e-3:";
  for (const auto& t : p3) os << " " << fmt(t);
  os << "; expected one 2 pi i and two pi i";
  return {ok, os.str()};
}

Outcome monodromyLattices() {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  auto jitter = [&] { return 1.0 + 0.2 * Complex(g(rng), g(rng)); };
  const std::vector<std::pair<int, SystemC>> cases = {
      {1, SystemC(2, {jitter(), 0, 0, jitter()})},
      {2, SystemC(3, {0, jitter(), 0, 0, jitter()})},
      {3, SystemC(3, {0, jitter(), 0, jitter(), 0})},
  };
  bool ok = true;
  std::ostringstream os;
  for (const auto& [id, sys] : cases) {
    try {
      const auto r = monodromyLatticeCheck(sys, id);
      ok = ok && r.onLattice && r.nonzero;
      os << "case " << id << ": m=" << r.m << " residual " << fmt(r.roundingResidual) << "; ";
    } catch (const Error& e) {
      ok = false;
      os << "case " << id << ": " << e.what() << "; ";
    }
  }
  return {ok, os.str()};
}

Outcome oracleEquivalence() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<long> num(-9, 9);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  double worst = 0.0;
  int points = 0;
  for (int n = 2; n <= 5; ++n) {
    std::vector<Q> a;
    for (int j = 0; j <= n + 1; ++j) a.emplace_back(mpq_class(num(rng), 5), mpq_class(num(rng), 3));
    a.back() = Q(1);
    const SystemQ sys(n, a);
    const auto dq = discriminantInY(HBivarPoly<Q>::levelSet(buildH(sys)));
    const auto pc = HBivarPoly<Complex>::levelSet(buildH(sys).cast<Complex>());
    for (int t = 0; t < 25; ++t, ++points) {
      const Complex h(u(rng), u(rng)), x(u(rng), u(rng));
      const Complex exact = dq.evalComplex(h, x);
      worst = std::max(worst, std::abs(discriminantAt(pc, h, x) - exact) / std::abs(exact));
    }
  }
  return {worst < 1e-8, std::to_string(points) + " points, max relative difference " + fmt(worst)};
}

Outcome admissibility() {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> coin(0, 1), deg(2, 6);
  std::uniform_int_distribution<long> num(1, 9);
  int agree = 0, exceptions = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = deg(rng);
    std::vector<Q> a;
    for (int j = 0; j <= n + 1; ++j) a.push_back(coin(rng) ? Q(num(rng)) : Q(0));
    try {
      const SystemQ sys(n, a);
      if (admissibleNonlinearities(sys) == isochronous(classifyIsochronicity(sys).verdict)) ++agree;
    } catch (const std::exception&) {
      ++exceptions;
    }
  }
  return {agree == 200 && exceptions == 0,
          std::to_string(agree) + "/200 agree, " + std::to_string(exceptions) + " exceptions"};
}

Outcome newtonPolygonGolden() {
  bool ok = true;
  std::ostringstream os;
  for (auto [n, N] : {std::pair{4, 2}, std::pair{6, 3}}) {
    std::vector<Complex> a(n + 2);
    a[N] = 1.0;
    a[n + 1] = 1.0;
    const SystemC sys(n, a);
    InfinitePoint px;
    for (const auto& p : pointsAtInfinity(sys))
      if (p.isPx) px = p;
    const auto poly = newtonPolygon(chartAt(sys, {0.03, 0.01}, px).f);
    const bool match = poly.segments.size() == 2 && poly.segments[0].from == Exponent{0, N} &&
                       poly.segments[0].to == Exponent{n - 1, 1} && poly.segments[1].to == Exponent{n + 1, 0};
    ok = ok && match;
    os << "(n,N)=(" << n << "," << N << "):";
    for (const auto& s : poly.segments)
      os << " (" << s.from.first << "," << s.from.second << ")-(" << s.to.first << "," << s.to.second << ")";
    os << "; ";
  }
  os << "expected (0,N)-(n-1,1)-(n+1,0)";
  return {ok, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"classification round-trip", classificationRoundTrip},
      {"constant value 2 pi i", constantValue},
      {"saddle asymptotics", saddleAsymptotics},
      {"residue certificate", residueCertificate},
      {"lambda index", lambdaCriterion},
      {"infinity cycles", infinityCycles},
      {"monodromy lattices", monodromyLattices},
      {"exact/floating discriminants", oracleEquivalence},
      {"admissibility equivalence", admissibility},
      {"Newton polygon golden test", newtonPolygonGolden},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
