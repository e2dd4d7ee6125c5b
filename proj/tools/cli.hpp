#ifndef ISOCHRON_TOOLS_CLI_HPP
#define ISOCHRON_TOOLS_CLI_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "isochron/cycles.hpp"

namespace isochron::cli {

using Json = nlohmann::ordered_json;

/// One system as read from a JSON document: {"n": 2, "a": [[re, im], ...], "field": "float"|"exact"}.
/// Exact entries are strings "p/q" (or pairs of them) and are kept verbatim for serialization.
struct SystemSpec {
  int n = 2;
  bool exact = false;
  std::vector<Complex> a;
  std::vector<std::array<std::string, 2>> exactText;

  SystemC floating() const;
  SystemQ rational() const;
};

SystemSpec parseSpec(const Json& j);
SystemSpec parseSpecText(const std::string& text);
Json toJson(const SystemSpec& spec);

struct Options {
  std::string command;         // classify | critical-points | infinity | lambda | periods | monodromy | verify
  std::string theorem;         // for verify: main | saddle-period | no-pole | lambda | infinity-cycles | monodromy
  std::string hGrid = "1e-3:1e-1:20";
  int samples = kDefaultSamples;
  std::uint64_t seed = 1;
  std::string field;           // empty: as in the spec
  int truncationOrder = -1;    // -1: automatic
  int caseId = 0;              // monodromy case; 0 infers it
};

/// Either "min:max:count" (moduli log-spaced in [min, max], arguments drawn from the seed)
/// or a comma-separated list of values such as "0.01,0.02-0.005i,3e-3i".
std::vector<Complex> parseGrid(const std::string& text, std::uint64_t seed);

struct Result {
  Json report;
  int exitCode = 0;  // 0 pass, 2 assertion failed, 3 numerical failure, 4 hypothesis not met / bad input
  std::string csv;   // filled by periods and verify main
};

Result run(const SystemSpec& spec, const Options& opts);

std::string scanCsv(const PeriodScanResult& scan);

}  // namespace isochron::cli

#endif  // ISOCHRON_TOOLS_CLI_HPP
