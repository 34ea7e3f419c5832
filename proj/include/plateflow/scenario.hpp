#pragma once

#include <array>
#include <cstdint>
#include <json.hpp>
#include <map>
#include <string>

#include "plateflow/solver_config.hpp"
#include "plateflow/spectral_field.hpp"

namespace plateflow {

/// Plain-text scenario file: one `key = value` per line, `#` starts a comment.
/// Numeric values accept constant expressions ("2*pi").
///
///   period_t, period_x      periods T, L                     (2*pi)
///   mu_f, mu_s              viscosities, >= 0                (1, 1)
///   nt, nx, nz              truncations, odd nt/nx <= 129, 4 <= nz <= 256
///   f1, f2, f3, g, h        forcing expressions over t, x1, x2, x3      ("0")
///   f_file, g_file, h_file  coefficient containers (.plf) instead of expressions
///   amplitude               scale applied to all data                  (1)
///   tol_eq, tol_bc, tol_nl, picard_tol, max_iter, eps0, q, dealias, check_residuals
///   k_max, xi_max           scan ranges                      (10000, 100)
///   report_k, report_xi     resonance-report lattice         (4, 4)
///   cases                   validation draws per experiment  (10)
///   seed                    base seed                        (1)
///   out                     output directory                 (".")
struct ScenarioConfig {
  SolverConfig solver;
  std::array<std::string, 3> f{"0", "0", "0"};
  std::string g = "0", h = "0";
  std::string f_file, g_file, h_file;
  double amplitude = 1.0;
  int k_max = 10000, xi_max = 100;
  int report_k = 4, report_xi = 4;
  int cases = 10;
  std::uint64_t seed = 1;
  std::string out = ".";
  std::map<std::string, std::string> raw;  // keys as written

  /// Throws Error(config) for truncations outside the limits or negative viscosities.
  void validate() const;
  /// The linear and nonlinear solvers need mu_s > 0.
  void require_damped() const;
  /// FNV-1a of the normalized key/value list.
  std::uint64_t hash() const;
  nlohmann::json to_json() const;
};

/// Throws Error(config) with "source:line" on unknown keys or malformed values.
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>");
ScenarioConfig load_config(const std::string& path);

/// Data from expressions or containers, scaled by the amplitude.
SpectralField load_forcing(const ScenarioConfig& c, const TorusGrid& grid);
SpectralField load_divergence(const ScenarioConfig& c, const TorusGrid& grid);
PlateField load_plate_load(const ScenarioConfig& c, const TorusGrid& grid);

}  // namespace plateflow
