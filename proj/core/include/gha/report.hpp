#pragma once

// Suite orchestration and bit-stable report emission.

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gha/config.hpp"

namespace gha {

inline constexpr const char* kReportSchema = "ghalab.report/v1";

enum class Relation { AtMost, AtLeast };

struct Check {
  std::string name;
  std::string group;
  double value = 0.0;
  Relation relation = Relation::AtMost;
  double threshold = 0.0;
  bool passed = false;
  /// Informational checks are reported but never fail a run.
  bool gated = true;
  /// The identity or property being measured.
  std::string identity;
  std::vector<std::string> operations;
  std::string note;
};

struct SpectrumRow {
  int n = 0;
  double analytic = 0.0;
  double computed = 0.0;
  double error = 0.0;
};

struct EigenvalueRow {
  int index = 0;
  double re = 0.0;
  double im = 0.0;
  double residual = 0.0;
};

struct PotentialRow {
  double x = 0.0;
  double value = 0.0;
};

struct Report {
  std::string schema = kReportSchema;
  std::string config_json;
  std::vector<Check> checks;
  std::vector<std::string> notes;
  std::vector<SpectrumRow> spectrum;
  std::vector<EigenvalueRow> eigenvalues;
  std::vector<PotentialRow> potential;
  std::optional<PotentialMinimum> potential_minimum;

  /// True when every gated check passed.
  bool passed() const;
  std::size_t failed_count() const;
  std::set<std::string> operations() const;
  const Check* find(const std::string& name) const;
};

namespace section {
inline constexpr unsigned kAlgebra = 1u << 0;
inline constexpr unsigned kSpecial = 1u << 1;
inline constexpr unsigned kModels = 1u << 2;
inline constexpr unsigned kDeformation = 1u << 3;
inline constexpr unsigned kDiscretization = 1u << 4;
inline constexpr unsigned kAll = 0x1f;
}  // namespace section

/// Runs the checks applicable to the configured model. Module errors become
/// failed checks; nothing escapes.
Report run_suite(const RunConfig& cfg, unsigned sections = section::kAll);

/// Every public operation of the numerical modules, by name.
const std::vector<std::string>& audited_operations();

/// Built-in configurations that together reach every audited operation.
std::vector<std::pair<std::string, RunConfig>> selftest_configs(int grid_points = 400);

/// Runs the built-in configurations, prefixes check names with the
/// configuration label and appends the coverage audit.
Report run_selftest(int grid_points = 400);

enum class Format { Json, Csv, Table };

Format parse_format(const std::string& name);

/// Shortest round-trip decimal with a trailing ".0" on integral values.
std::string format_real(double x);
/// Shortest round-trip decimal.
std::string format_shortest(double x);

std::string render(const Report& report, Format format);
std::string render_spectrum_csv(const Report& report);
std::string render_eigenvalues_csv(const Report& report);
std::string render_potential_csv(const Report& report);

/// Samples of the effective potential on [-4, 4] in steps of 0.01.
std::vector<PotentialRow> potential_rows(const ModelSpec& m);

/// Write-then-rename; throws IoError.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Writes the main report in `format` plus the requested auxiliary tables.
std::vector<std::filesystem::path> emit(const Report& report, Format format, const std::filesystem::path& dir,
                                        const std::vector<std::string>& outputs);

}  // namespace gha
