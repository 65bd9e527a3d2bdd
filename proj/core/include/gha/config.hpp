#pragma once

// Run configuration: JSON on disk, validated, with defaults filled in.
//
//   {
//     "schema_version": 1,
//     "model": "poschl_teller",            infinite_well | poschl_teller |
//                                          harmonic_oscillator | quon | pseudo_boson_power
//     "lambda": 2.0,                       poschl_teller only
//     "q": 0.5,                            quon only
//     "k": 1,                              pseudo_boson_power only
//     "deformation": {"kind": "rational_pt"},
//                    kinds: rational_pt | tanh_shift | inverse_cosine (alpha, k0) |
//                           diagonal_of_number (sigma: a profile object)
//     "truncation": {"N": 64, "margin": 8},
//     "grid": {"x_min": 0.0, "x_max": 3.14159, "n_points": 2000},
//     "n_max": 55,
//     "tolerances": {"algebra": 1e-10, "grid_algebra": 1e-6, "eigen": 1e-3,
//                    "quadrature": 1e-8, "biorthogonality": 1e-8, "similarity": 1e-9},
//     "seed": 0,
//     "outputs": ["spectrum", "eigenvalues", "potential"]
//   }

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gha/discretization.hpp"
#include "gha/models.hpp"

namespace gha {

inline constexpr int kSchemaVersion = 1;

struct Tolerances {
  double algebra = 1e-10;
  double grid_algebra = 1e-6;
  double eigen = 1e-3;
  double quadrature = 1e-8;
  double biorthogonality = 1e-8;
  double similarity = 1e-9;
};

struct GridConfig {
  std::optional<double> x_min;
  std::optional<double> x_max;
  int n_points = 2000;
};

struct RunConfig {
  int schema_version = kSchemaVersion;
  ModelSpec model;
  Index N = 64;
  Index margin = 8;
  GridConfig grid;
  int n_max = -1;  // -1 resolves to N - margin - 1
  Tolerances tolerances;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs{"spectrum", "eigenvalues"};

  int family_depth() const { return n_max >= 0 ? n_max : static_cast<int>(N - margin - 1); }
  /// Grid over the model interval unless overridden; throws Unsupported without one.
  Grid resolved_grid() const;
  /// Throws ValidationError listing every violation.
  void validate() const;
  /// Canonical JSON echo with all defaults resolved.
  std::string to_json() const;
};

RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(std::string_view text, const std::string& source = "<config>");

/// Output artifact names accepted in "outputs".
const std::vector<std::string>& known_outputs();

}  // namespace gha
