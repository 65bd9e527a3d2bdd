// ghalab: run GHA / DGHA property suites from a JSON configuration.
//
// Exit codes: 0 all gated checks pass, 1 a gated check fails,
// 2 configuration error, 3 I/O error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gha/config.hpp"
#include "gha/error.hpp"
#include "gha/report.hpp"

namespace {

enum Exit { kPass = 0, kFail = 1, kConfigError = 2, kIoError = 3 };

struct Options {
  std::string config;
  std::string out;
  std::string format = "table";
  std::optional<std::uint64_t> seed;
  std::optional<int> n;
  std::optional<int> grid;
};

unsigned sections_for(const std::string& command, const gha::RunConfig& cfg) {
  using namespace gha::section;
  if (command == "spectrum") {
    return kAlgebra | (cfg.model.has_position_realization() ? kDiscretization : kDeformation);
  }
  if (command == "verify") return kAlgebra | kSpecial | kModels;
  if (command == "deform") return kDeformation;
  if (command == "eigensolve") return kDiscretization;
  if (command == "potential") return kModels;
  return kAll;
}

gha::RunConfig load(const Options& opt, const std::string& command) {
  gha::RunConfig cfg = gha::parse_config(opt.config);
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.n) {
    cfg.N = *opt.n;
    if (cfg.margin >= cfg.N) cfg.margin = gha::default_margin(cfg.N);
  }
  if (opt.grid) cfg.grid.n_points = *opt.grid;
  if (command == "potential") {
    bool listed = false;
    for (const auto& o : cfg.outputs) listed = listed || o == "potential";
    if (!listed) cfg.outputs.push_back("potential");
  }
  cfg.validate();
  return cfg;
}

int finish(const gha::Report& report, const Options& opt, const std::vector<std::string>& outputs) {
  const gha::Format format = gha::parse_format(opt.format);
  if (opt.out.empty()) {
    std::cout << gha::render(report, format);
  } else {
    for (const auto& path : gha::emit(report, format, opt.out, outputs)) std::cerr << "wrote " << path.string() << '\n';
    if (format != gha::Format::Table) std::cout << gha::render(report, gha::Format::Table);
  }
  return report.passed() ? kPass : kFail;
}

int run(const std::string& command, const Options& opt) {
  try {
    gha::parse_format(opt.format);
    if (command == "selftest") {
      const gha::Report report = gha::run_selftest(opt.grid.value_or(400));
      return finish(report, opt, {"spectrum", "eigenvalues", "potential"});
    }
    if (opt.config.empty()) {
      std::cerr << "ghalab " << command << ": --config is required\n";
      return kConfigError;
    }
    const gha::RunConfig cfg = load(opt, command);
    const gha::Report report = gha::run_suite(cfg, sections_for(command, cfg));
    return finish(report, opt, cfg.outputs);
  } catch (const gha::Error& e) {
    std::cerr << "ghalab: " << e.what() << '\n';
    switch (e.code()) {
      case gha::ErrorCode::IoError: return kIoError;
      case gha::ErrorCode::ParseError:
      case gha::ErrorCode::ValidationError: return kConfigError;
      default: return kConfigError;
    }
  } catch (const std::exception& e) {
    std::cerr << "ghalab: " << e.what() << '\n';
    return kIoError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized Heisenberg algebra property suites"};
  app.require_subcommand(1);
  Options opt;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"spectrum", "closed-form spectrum against the recursion and the grid"},
      {"verify", "algebra, special-function and model identities"},
      {"deform", "deformed algebra, biorthogonal families and frames"},
      {"eigensolve", "finite-difference eigensolves, deformed and undeformed"},
      {"potential", "effective potential samples of the deformed oscillator"},
      {"report", "every applicable check"},
      {"selftest", "built-in configurations plus the coverage audit"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory; prints to stdout when absent");
    sub->add_option("--format", opt.format, "json, csv or table")
        ->check(CLI::IsMember({"json", "csv", "table"}));
    sub->add_option("--seed", opt.seed, "override the configured seed");
    sub->add_option("--n", opt.n, "override the truncation size N")->check(CLI::PositiveNumber);
    sub->add_option("--grid", opt.grid, "override the grid node count")->check(CLI::PositiveNumber);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }
  for (const auto& [name, help] : commands) {
    if (app.got_subcommand(name)) return run(name, opt);
  }
  return kConfigError;
}
