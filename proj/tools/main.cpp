#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cli.hpp"
#include "isochron/errors.hpp"

namespace fs = std::filesystem;
using namespace isochron;

namespace {

std::string readFile(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ParseError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeText(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isochronicity analysis of xy + H_{n+1}(x, y)"};
  app.require_subcommand(1);

  cli::Options opts;
  std::string input, out, csv;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"classify", "isochronicity verdict with witness and admissibility cross-check"},
      {"critical-points", "finite critical points, extra points on L_0 and atypical values"},
      {"infinity", "points at infinity and residues of dx/H_y on each branch"},
      {"lambda", "topological index lambda on the grid and at h = 0"},
      {"periods", "period scan of the origin loop over the grid"},
      {"monodromy", "period shift after continuation around atypical values"},
      {"verify", "check one theorem's statement on the given system"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("spec", input, "system spec (JSON file) or directory of specs")->required();
    sub->add_option("--h-grid", opts.hGrid, "min:max:count or comma-separated values")->capture_default_str();
    sub->add_option("--samples", opts.samples, "samples per loop")->capture_default_str();
    sub->add_option("--seed", opts.seed, "seed for grid arguments")->capture_default_str();
    sub->add_option("--field", opts.field, "override the spec field")->check(CLI::IsMember({"float", "exact"}));
    sub->add_option("--truncation-order", opts.truncationOrder, "Puiseux truncation (-1 automatic)")
        ->capture_default_str();
    sub->add_option("--out", out, "JSON report destination (default stdout)");
    sub->add_option("--csv", csv, "period table destination (file, or directory in batch mode)");
    if (name == "monodromy" || name == "verify") sub->add_option("--case", opts.caseId, "monodromy case 1-5");
    if (name == "verify")
      sub->add_option("--theorem", opts.theorem, "theorem to check")
          ->required()
          ->check(CLI::IsMember({"main", "saddle-period", "no-pole", "lambda", "infinity-cycles", "monodromy"}));
  }
  CLI11_PARSE(app, argc, argv);
  opts.command = app.get_subcommands().front()->get_name();

  std::vector<fs::path> files;
  const bool batch = fs::is_directory(input);
  if (batch) {
    for (const auto& e : fs::directory_iterator(input))
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(input);
  }

  int exitCode = 0;
  cli::Json reports = cli::Json::array();
  for (const auto& f : files) {
    cli::Result r;
    try {
      r = cli::run(cli::parseSpecText(readFile(f)), opts);
    } catch (const Error& e) {
      r.report["command"] = opts.command;
      r.report["error"] = e.what();
      r.report["exit_code"] = 4;
      r.exitCode = 4;
    }
    exitCode = std::max(exitCode, r.exitCode);
    if (!csv.empty() && !r.csv.empty()) {
      if (batch) {
        fs::create_directories(csv);
        writeText((fs::path(csv) / f.stem()).string() + ".csv", r.csv);
      } else {
        writeText(csv, r.csv);
      }
    }
    if (batch) {
      reports.push_back({{"file", f.filename().string()}, {"report", r.report}});
    } else {
      reports = r.report;
    }
    if (r.report.contains("error")) std::cerr << f.string() << ": " << r.report["error"].get<std::string>() << "\n";
  }
  writeText(out, reports.dump(2) + "\n");
  return exitCode;
}
