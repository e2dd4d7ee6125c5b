#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "isochron/errors.hpp"
#include "isochron/infinity.hpp"

namespace isochron::cli {

namespace {

Json cjson(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex parseComplexLiteral(std::string s) {
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  if (s.empty()) throw ParseError("empty grid value");
  double re = 0.0, im = 0.0;
  std::size_t used = 0;
  try {
    if (s.back() == 'i') {
      const std::string body = s.substr(0, s.size() - 1);
      // Split at the last sign that is not part of an exponent.
      std::size_t split = std::string::npos;
      for (std::size_t k = body.size(); k-- > 1;)
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
          split = k;
          break;
        }
      if (split == std::string::npos) {
        im = body.empty() || body == "+" ? 1.0 : body == "-" ? -1.0 : std::stod(body, &used);
        if (!body.empty() && body != "+" && body != "-" && used != body.size()) throw ParseError("bad value '" + s + "'");
      } else {
        re = std::stod(body.substr(0, split), &used);
        if (used != split) throw ParseError("bad value '" + s + "'");
        const std::string ip = body.substr(split);
        im = ip == "+" ? 1.0 : ip == "-" ? -1.0 : std::stod(ip, &used);
        if (ip != "+" && ip != "-" && used != ip.size()) throw ParseError("bad value '" + s + "'");
      }
    } else {
      re = std::stod(s, &used);
      if (used != s.size()) throw ParseError("bad value '" + s + "'");
    }
  } catch (const std::logic_error&) {
    throw ParseError("bad value '" + s + "'");
  }
  return {re, im};
}

bool numericalFailure(const Error& e) {
  return dynamic_cast<const NewtonDivergence*>(&e) || dynamic_cast<const QuadratureStall*>(&e) ||
         dynamic_cast<const BranchJump*>(&e) || dynamic_cast<const RamificationCollision*>(&e) ||
         dynamic_cast<const BlowupChartFailure*>(&e) || dynamic_cast<const TrackingLost*>(&e) ||
         dynamic_cast<const BranchFailure*>(&e) || dynamic_cast<const CharacteristicDegenerate*>(&e) ||
         dynamic_cast<const DegenerateResultant*>(&e);
}

Json verdictJson(const IsochronicityVerdict& v, bool admissible, bool condI, bool condII, bool resonance,
                 bool nonIsolated) {
  Json j;
  j["verdict"] = verdictName(v.verdict);
  j["witness_pair"] = v.witnessPair ? Json::array({v.witnessPair->first, v.witnessPair->second}) : Json();
  j["resonant_index"] = v.resonantIndex ? Json(*v.resonantIndex) : Json();
  j["condition_I"] = condI;
  j["condition_II"] = condII;
  j["resonance_obstruction"] = resonance;
  j["non_isolated_locus"] = nonIsolated;
  j["admissible_nonlinearities"] = admissible;
  j["admissibility_agrees"] = admissible == (v.verdict != Verdict::NotIsochronous);
  return j;
}

template <class Sys>
Json classifyJson(const Sys& sys) {
  return verdictJson(classifyIsochronicity(sys), admissibleNonlinearities(sys), conditionI(sys), conditionII(sys),
                     resonanceObstruction(sys), nonIsolatedLocus(sys));
}

Json criticalPointJson(const SystemC& sys, const CriticalPoint& p) {
  const auto [fx, fy] = vectorField(sys, p.x, p.y);
  Json j;
  j["x"] = cjson(p.x);
  j["y"] = cjson(p.y);
  j["value"] = cjson(p.value);
  j["hessian_rank"] = p.hessianRank;
  j["milnor_number"] = p.milnorNumber;
  j["ak_type"] = p.akType;
  j["isolated"] = p.isolated;
  j["gradient_residual"] = std::hypot(std::abs(fx), std::abs(fy));
  return j;
}

Json pointJson(const InfinitePoint& p) {
  Json j;
  j["beta"] = cjson(p.beta);
  j["alpha"] = cjson(p.alpha);
  j["multiplicity"] = p.multiplicity;
  j["label"] = p.isPx ? "P_x" : p.isPy ? "P_y" : "other";
  return j;
}

Json sampleJson(const PeriodSample& s) {
  Json j;
  j["h"] = cjson(s.h);
  j["T"] = cjson(s.T);
  j["deviation"] = std::abs(s.T - kTwoPiI);
  j["quadrature_error"] = s.quadratureError;
  j["anchor"] = anchorName(s.loopAnchor);
  return j;
}

Json scanJson(const PeriodScanResult& r) {
  Json j;
  j["samples"] = Json::array();
  for (const auto& s : r.samples) j["samples"].push_back(sampleJson(s));
  j["statistic"] = r.statistic;
  j["errors"] = r.errors;
  return j;
}

double distanceTo(Complex h, const std::vector<Complex>& values) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& v : values) d = std::min(d, std::abs(h - v));
  return d;
}

struct Context {
  const SystemSpec& spec;
  const Options& opts;
  bool exact;
  SystemC sys;
  std::vector<Complex> grid;
  Json report;
  Json warnings = Json::array();
  int exitCode = 0;
  std::string csv;

  void fail() { exitCode = std::max(exitCode, 2); }
};

void doClassify(Context& c) {
  c.report["classification"] = c.exact ? classifyJson(c.spec.rational()) : classifyJson(c.sys);
  if (!c.report["classification"]["admissibility_agrees"].get<bool>()) c.fail();
}

void doCriticalPoints(Context& c) {
  std::vector<std::string> warnings;
  const auto pts = c.exact ? finiteCriticalPoints(c.spec.rational(), &warnings) : finiteCriticalPoints(c.sys, &warnings);
  Json list = Json::array();
  for (const auto& p : pts) list.push_back(criticalPointJson(c.sys, p));
  c.report["critical_points"] = list;
  Json extra = Json::array();
  for (const auto& p : l0ExtraCriticalPoints(c.sys)) extra.push_back(criticalPointJson(c.sys, p));
  c.report["l0_extra_points"] = extra;
  Json atyp = Json::array();
  for (const auto& v : atypicalValues(c.sys)) atyp.push_back(cjson(v));
  c.report["atypical_values"] = atyp;
  for (const auto& w : warnings) c.warnings.push_back(w);
}

Json residueTable(Context& c, bool& allZero) {
  const auto atyp = atypicalValues(c.sys);
  Json rows = Json::array();
  allZero = true;
  for (const auto& h : c.grid) {
    if (distanceTo(h, atyp) < 1e-9) {
      c.warnings.push_back("skipped atypical grid value");
      continue;
    }
    for (const auto& p : pointsAtInfinity(c.sys)) {
      const auto chart = chartAt(c.sys, h, p);
      for (const auto& r : residueAtInfinity(c.sys, h, p, c.opts.truncationOrder)) {
        const Complex check = residueByContour(chart, r.branch);
        Json row;
        row["h"] = cjson(h);
        row["point"] = pointJson(p);
        row["x_exponent"] = r.branch.xExponent;
        row["y_valuation"] = r.branch.yValuation;
        row["residue"] = cjson(r.residue);
        row["error"] = std::abs(r.residue - check);
        rows.push_back(row);
        if (std::abs(r.residue) > 1e-9) allZero = false;
      }
    }
  }
  return rows;
}

void doInfinity(Context& c) {
  Json pts = Json::array();
  for (const auto& p : pointsAtInfinity(c.sys)) pts.push_back(pointJson(p));
  c.report["infinite_points"] = pts;
  bool allZero = true;
  c.report["residues"] = residueTable(c, allZero);
}

int lambdaAt(Context& c, Complex h) {
  return c.exact ? lambdaIndex(c.spec.rational(), GaussianRational::fromComplex(h)) : lambdaIndex(c.sys, h);
}

int lambdaAtPoint(Context& c, Complex h, const InfinitePoint& p) {
  return c.exact ? lambdaIndexAtPoint(c.spec.rational(), GaussianRational::fromComplex(h), p)
                 : lambdaIndexAtPoint(c.sys, h, p);
}

bool doLambda(Context& c) {
  Json table = Json::array();
  const auto atyp = atypicalValues(c.sys);
  bool genericZero = true;
  for (const auto& h : c.grid) {
    const int l = lambdaAt(c, h);
    table.push_back({{"h", cjson(h)}, {"lambda", l}});
    if (distanceTo(h, atyp) > 1e-9 && l != 0) genericZero = false;
  }
  const int global = lambdaAt(c, 0.0);
  table.push_back({{"h", cjson(0.0)}, {"lambda", global}});
  c.report["lambda_table"] = table;
  Json per = Json::array();
  int total = 0;
  for (const auto& p : pointsAtInfinity(c.sys)) {
    const int at = lambdaAtPoint(c, 0.0, p);
    total += at;
    per.push_back({{"point", pointJson(p)}, {"lambda", at}});
  }
  c.report["lambda_at_points"] = per;
  c.report["lambda_sum_agrees"] = total == global;
  return genericZero && total == global;
}

PeriodScanResult doPeriods(Context& c) {
  const auto scan = periodScan(c.sys, c.grid, c.opts.samples);
  c.report["period_scan"] = scanJson(scan);
  c.csv = scanCsv(scan);
  for (const auto& e : scan.errors) c.warnings.push_back(e);
  return scan;
}

int inferCase(const SystemC& sys) {
  for (int id = 1; id <= 5; ++id) {
    try {
      monodromyLatticeCheck(sys, id);
      return id;
    } catch (const CaseMismatch&) {
    } catch (const Error&) {
      return id;
    }
  }
  throw HypothesisNotMet("coefficients match none of the monodromy cases 1-5");
}

bool doMonodromy(Context& c) {
  if (classifyIsochronicity(c.sys).verdict != Verdict::NotIsochronous)
    throw HypothesisNotMet("monodromy lattices concern non-isochronous systems");
  int id = c.opts.caseId;
  MonodromyReport r;
  try {
    if (id == 0) id = inferCase(c.sys);
    r = monodromyLatticeCheck(c.sys, id);
  } catch (const CaseMismatch& e) {
    throw HypothesisNotMet(e.what());
  }
  Json j;
  j["case"] = r.caseId;
  j["base_h"] = cjson(r.baseH);
  j["encircled_value"] = cjson(r.encircledValue);
  j["period_gamma"] = cjson(r.periodGamma);
  j["saddle_periods"] = Json::array();
  for (const auto& t : r.saddlePeriods) j["saddle_periods"].push_back(cjson(t));
  j["infinity_periods"] = Json::array();
  for (const auto& t : r.infinityPeriods) j["infinity_periods"].push_back(cjson(t));
  j["predicted_coefficient"] = cjson(r.predictedCoefficient);
  j["asymptotic_coefficient"] = cjson(r.asymptoticCoefficient);
  j["period_delta"] = cjson(r.periodDelta);
  j["period_after"] = cjson(r.periodAfter);
  j["shift"] = cjson(r.shift);
  j["m_real"] = r.mReal;
  j["m"] = r.m;
  j["rounding_residual"] = r.roundingResidual;
  j["on_lattice"] = r.onLattice;
  j["nonzero"] = r.nonzero;
  c.report["monodromy"] = j;
  return r.onLattice && r.nonzero;
}

bool verifyMain(Context& c) {
  doClassify(c);
  const bool iso = classifyIsochronicity(c.sys).verdict != Verdict::NotIsochronous;
  const auto scan = doPeriods(c);
  if (!scan.errors.empty()) {
    c.report["error"] = scan.errors.front();
    c.exitCode = 3;
  }
  const bool ok = iso ? scan.statistic < 1e-8 : scan.statistic > 1e-4;
  c.report["assertion"] = iso ? "statistic < 1e-8" : "statistic > 1e-4";
  return ok;
}

bool verifySaddlePeriod(Context& c) {
  std::vector<CriticalPoint> saddles;
  for (const auto& p : l0ExtraCriticalPoints(c.sys))
    if (p.hessianRank == 2) saddles.push_back(p);
  if (saddles.empty()) throw HypothesisNotMet("no Morse point on L_0 besides the origin");
  const Complex piI{0.0, kPi};
  Json rows = Json::array();
  bool ok = true;
  for (const auto& s : saddles) {
    const auto p3 = period(liftSaddleLoop(c.sys, 1e-3, s, c.opts.samples));
    const auto p4 = period(liftSaddleLoop(c.sys, 1e-4, s, c.opts.samples));
    const double e3 = std::abs(p3.T - piI), e4 = std::abs(p4.T - piI);
    ok = ok && e3 < 1e-2 && e4 < e3;
    rows.push_back({{"x", cjson(s.x)},
                    {"y", cjson(s.y)},
                    {"samples", Json::array({sampleJson(p3), sampleJson(p4)})},
                    {"error_1e-3", e3},
                    {"error_1e-4", e4}});
  }
  c.report["saddle_periods"] = rows;
  c.report["assertion"] = "|T - pi i| < 1e-2 at |h| = 1e-3 and smaller at 1e-4";
  return ok;
}

bool verifyNoPole(Context& c) {
  if (classifyIsochronicity(c.sys).verdict != Verdict::NotIsochronous)
    throw HypothesisNotMet("the vanishing of residues at infinity concerns non-isochronous systems");
  bool allZero = true;
  c.report["residues"] = residueTable(c, allZero);
  c.report["assertion"] = "every residue at infinity below 1e-9";
  return allZero;
}

bool verifyInfinityCycles(Context& c) {
  if (classifyIsochronicity(c.sys).verdict != Verdict::NotIsochronous)
    throw HypothesisNotMet("infinity cycles are built for non-isochronous systems");
  const int n = c.sys.n;
  std::vector<InfinitePoint> eligible;
  for (const auto& p : pointsAtInfinity(c.sys))
    if ((p.isPx || p.isPy) && p.multiplicity > 1 && 2 * p.multiplicity < n + 1) eligible.push_back(p);
  if (eligible.empty()) throw HypothesisNotMet("no P_x or P_y with 1 < N < (n+1)/2");
  Json rows = Json::array();
  bool ok = true;
  for (const auto& p : eligible) {
    const int N = p.multiplicity;
    std::vector<double> prev;
    Json entry;
    entry["point"] = pointJson(p);
    for (double h : {1e-3, 1e-4}) {
      const auto loops = liftInfinityCycles(c.sys, h, p, c.opts.samples);
      std::vector<double> err;
      Json periods = Json::array();
      for (size_t i = 0; i < loops.size(); ++i) {
        const auto s = period(loops[i]);
        const Complex expected = i == 0 ? kTwoPiI : kTwoPiI / double(N - 1);
        err.push_back(std::abs(s.T - expected));
        Json row = sampleJson(s);
        row["expected"] = cjson(expected);
        periods.push_back(row);
      }
      ok = ok && static_cast<int>(loops.size()) == N;
      for (size_t i = 0; i < err.size(); ++i) {
        ok = ok && err[i] < 1e-2;
        if (!prev.empty()) ok = ok && err[i] < prev[i];
      }
      prev = err;
      entry[h == 1e-3 ? "h_1e-3" : "h_1e-4"] = periods;
    }
    rows.push_back(entry);
  }
  c.report["infinity_cycles"] = rows;
  c.report["assertion"] = "N loops; one period near 2 pi i, the others near 2 pi i/(N-1), errors decreasing";
  return ok;
}

}  // namespace

SystemC SystemSpec::floating() const { return {n, a}; }

SystemQ SystemSpec::rational() const {
  std::vector<GaussianRational> q;
  if (exact) {
    for (const auto& t : exactText) q.push_back(GaussianRational::parse(t[0], t[1]));
  } else {
    for (const auto& z : a) q.push_back(GaussianRational::fromComplex(z));
  }
  return {n, q};
}

SystemSpec parseSpec(const Json& j) {
  if (!j.is_object()) throw ParseError("spec must be a JSON object");
  if (!j.contains("n") || !j["n"].is_number_integer()) throw ParseError("field 'n': integer required");
  if (!j.contains("a") || !j["a"].is_array()) throw ParseError("field 'a': array required");
  SystemSpec s;
  s.n = j["n"].get<int>();
  if (s.n < 2) throw ParseError("field 'n': must be >= 2");
  std::string field = j.value("field", std::string());
  const auto& a = j["a"];
  if (field.empty()) field = !a.empty() && (a[0].is_string() || (a[0].is_array() && !a[0].empty() && a[0][0].is_string()))
                                 ? "exact"
                                 : "float";
  if (field != "float" && field != "exact") throw ParseError("field 'field': expected \"float\" or \"exact\"");
  s.exact = field == "exact";
  if (static_cast<int>(a.size()) != s.n + 2)
    throw ParseError("field 'a': expected " + std::to_string(s.n + 2) + " entries, got " + std::to_string(a.size()));
  for (std::size_t k = 0; k < a.size(); ++k) {
    const auto& e = a[k];
    const std::string where = "field 'a[" + std::to_string(k) + "]': ";
    if (s.exact) {
      std::array<std::string, 2> t{"0", "0"};
      if (e.is_string()) {
        t[0] = e.get<std::string>();
      } else if (e.is_array() && e.size() == 2 && e[0].is_string() && e[1].is_string()) {
        t = {e[0].get<std::string>(), e[1].get<std::string>()};
      } else if (e.is_array() && e.size() == 2 && e[0].is_number_integer() && e[1].is_number_integer()) {
        t = {std::to_string(e[0].get<long>()), std::to_string(e[1].get<long>())};
      } else {
        throw ParseError(where + "expected \"p/q\" or [\"p/q\", \"p/q\"]");
      }
      GaussianRational q;
      try {
        q = GaussianRational::parse(t[0], t[1]);
      } catch (const ParseError& err) {
        throw ParseError(where + err.what());
      }
      s.exactText.push_back(t);
      s.a.push_back(q.toComplex());
    } else {
      if (!(e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()))
        throw ParseError(where + "expected [re, im]");
      s.a.emplace_back(e[0].get<double>(), e[1].get<double>());
    }
  }
  return s;
}

SystemSpec parseSpecText(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  return parseSpec(j);
}

Json toJson(const SystemSpec& spec) {
  Json j;
  j["n"] = spec.n;
  j["field"] = spec.exact ? "exact" : "float";
  j["a"] = Json::array();
  if (spec.exact) {
    for (const auto& t : spec.exactText) j["a"].push_back(Json::array({t[0], t[1]}));
  } else {
    for (const auto& z : spec.a) j["a"].push_back(cjson(z));
  }
  return j;
}

std::vector<Complex> parseGrid(const std::string& text, std::uint64_t seed) {
  std::vector<Complex> out;
  if (std::count(text.begin(), text.end(), ':') == 2) {
    std::stringstream ss(text);
    std::string lo, hi, count;
    std::getline(ss, lo, ':');
    std::getline(ss, hi, ':');
    std::getline(ss, count);
    double r0, r1;
    int m;
    try {
      r0 = std::stod(lo);
      r1 = std::stod(hi);
      m = std::stoi(count);
    } catch (const std::logic_error&) {
      throw ParseError("--h-grid: expected min:max:count");
    }
    if (!(r0 > 0.0 && r1 >= r0 && m >= 1)) throw ParseError("--h-grid: need 0 < min <= max and count >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> arg(0.0, 2.0 * kPi);
    for (int k = 0; k < m; ++k) {
      const double t = m == 1 ? 0.0 : double(k) / (m - 1);
      out.push_back(std::polar(r0 * std::pow(r1 / r0, t), arg(rng)));
    }
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parseComplexLiteral(item));
  if (out.empty()) throw ParseError("--h-grid: no values");
  return out;
}

std::string scanCsv(const PeriodScanResult& scan) {
  std::ostringstream os;
  os.precision(17);
  os << "h_re,h_im,T_re,T_im,abs_T_minus_2pi_i,quadrature_error\n";
  for (const auto& s : scan.samples)
    os << s.h.real() << ',' << s.h.imag() << ',' << s.T.real() << ',' << s.T.imag() << ','
       << std::abs(s.T - kTwoPiI) << ',' << s.quadratureError << '\n';
  return os.str();
}

Result run(const SystemSpec& spec, const Options& opts) {
  SystemSpec effective = spec;
  if (opts.field == "float") effective.exact = false;
  if (opts.field == "exact" && !spec.exact) {
    effective.exact = true;
    for (const auto& q : spec.rational().a) effective.exactText.push_back({q.re().get_str(), q.im().get_str()});
  }
  Context c{effective, opts, effective.exact, effective.floating(), {}, {}};
  c.report["command"] = opts.command;
  if (!opts.theorem.empty()) c.report["theorem"] = opts.theorem;
  c.report["spec"] = toJson(spec);
  c.report["seed"] = opts.seed;
  c.report["h_grid"] = opts.hGrid;
  try {
    c.grid = parseGrid(opts.hGrid, opts.seed);
    bool ok = true;
    const std::string& cmd = opts.command;
    if (cmd == "classify") {
      doClassify(c);
    } else if (cmd == "critical-points") {
      doCriticalPoints(c);
    } else if (cmd == "infinity") {
      doInfinity(c);
    } else if (cmd == "lambda") {
      doLambda(c);
    } else if (cmd == "periods") {
      doPeriods(c);
    } else if (cmd == "monodromy") {
      ok = doMonodromy(c);
    } else if (cmd == "verify") {
      const std::string& t = opts.theorem;
      if (t == "main") ok = verifyMain(c);
      else if (t == "saddle-period") ok = verifySaddlePeriod(c);
      else if (t == "no-pole") ok = verifyNoPole(c);
      else if (t == "lambda") ok = doLambda(c);
      else if (t == "infinity-cycles") ok = verifyInfinityCycles(c);
      else if (t == "monodromy") ok = doMonodromy(c);
      else throw ParseError("--theorem: unknown theorem '" + t + "'");
      c.report["passed"] = ok;
    } else {
      throw ParseError("unknown subcommand '" + cmd + "'");
    }
    if (!ok) c.fail();
  } catch (const Error& e) {
    c.report["error"] = e.what();
    c.exitCode = numericalFailure(e) ? 3 : 4;
  }
  c.report["warnings"] = c.warnings;
  c.report["exit_code"] = c.exitCode;
  return {c.report, c.exitCode, c.csv};
}

}  // namespace isochron::cli
