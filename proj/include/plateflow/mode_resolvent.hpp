#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "plateflow/solver_config.hpp"
#include "plateflow/spectral_field.hpp"

namespace plateflow {

/// One mode's unknowns: u (nodes x 3), p (nodes), eta.
struct ModeSolution {
  ModeIndex mode;
  Eigen::MatrixXcd u;
  Eigen::VectorXcd p;
  cplx eta{0.0};
};

/// One mode's data: f (nodes x 3), g (nodes), h.
struct ModeData {
  Eigen::MatrixXcd f;
  Eigen::VectorXcd g;
  cplx h{0.0};

  static ModeData zero(int nodes) {
    return {Eigen::MatrixXcd::Zero(nodes, 3), Eigen::VectorXcd::Zero(nodes), cplx(0.0)};
  }
};

/// Max-abs residuals of the collocated mode equations.
struct ModeResidual {
  double momentum = 0.0;    // interior nodes
  double continuity = 0.0;  // all nodes
  double bc = 0.0;          // u'(0), u3(0) + i omega eta, u(1)
  double plate = 0.0;
  double max() const { return std::max(std::max(momentum, continuity), std::max(bc, plate)); }
};

/// |xi'|^4 - omega^2 + i omega mu_s |xi'|^2 in physical units.
cplx plate_symbol_damped(double omega, double xi2, double mu_s);
cplx plate_symbol_damped(const TorusGrid& grid, const ModeIndex& m, double mu_s);

/// Apply the mode operators of the linear system to (u, p, eta).
ModeData apply_mode_operator(const TorusGrid& grid, double mu_f, double mu_s, const ModeIndex& m,
                             const ModeSolution& s);
ModeResidual mode_residual(const TorusGrid& grid, double mu_f, double mu_s, const ModeIndex& m,
                           const ModeSolution& s, const ModeData& d);

/// Per-mode solver with factorizations cached by (k, |xi'|^2). For xi' != 0 the
/// system is written in the frame (xi'/|xi'|, xi'_perp/|xi'|): the parallel
/// velocity, u3, p and eta form one dense collocation system and the
/// perpendicular velocity a scalar two-point problem. Thread-safe.
class ModeSolver {
 public:
  ModeSolver(const TorusGrid& grid, double mu_f, double mu_s, double tol_eq = 1e-9, bool check = true);
  explicit ModeSolver(const SolverConfig& cfg);

  /// Any k; k = 0 gives the steady problem.
  ModeSolution solve(const ModeIndex& m, const ModeData& d) const;

  const TorusGrid& grid() const { return grid_; }
  double mu_f() const { return mu_f_; }
  double mu_s() const { return mu_s_; }

 private:
  struct Factor;
  std::shared_ptr<const Factor> factor(const ModeIndex& m) const;
  ModeSolution solve_lateral_zero(const ModeIndex& m, const ModeData& d, const Factor& fac) const;

  TorusGrid grid_;
  double mu_f_, mu_s_, tol_eq_;
  bool check_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<int, long>, std::shared_ptr<const Factor>> cache_;
};

ModeSolution solve_oscillatory_mode(const TorusGrid& grid, const SolverConfig& cfg, const ModeIndex& m,
                                    const ModeData& d);
ModeSolution solve_steady_mode(const TorusGrid& grid, const SolverConfig& cfg, int m1, int m2, const ModeData& d);

/// Divergence-free member of the test space at (k, xi'): w(1) = 0, w(0) = -i omega zeta e3.
struct TestPair {
  Eigen::MatrixXcd w;  // nodes x 3
  cplx zeta{0.0};
};

/// w3 = -i omega zeta (1 - 3x^2 + 2x^3) + a x^2 (1-x)^2, w' = i xi' w3' / |xi'|^2 + c xi'_perp x (1-x);
/// at xi' = 0: zeta = 0, w3 = 0, w' = x (1-x) (a, c).
TestPair make_test_pair(const TorusGrid& grid, const ModeIndex& m, cplx zeta, cplx a, cplx c);

/// Sesquilinear form of the weak formulation with mu_f, mu_s kept symbolic.
cplx weak_form_B(const TorusGrid& grid, double mu_f, double mu_s, const ModeIndex& m, const Eigen::MatrixXcd& u,
                 cplx eta, const TestPair& test);
/// Right-hand side -i omega h conj(zeta) + int f . conj(w).
cplx weak_form_rhs(const TorusGrid& grid, const ModeIndex& m, const ModeData& d, const TestPair& test);

/// (||u_k||_{1,2} + ||eta_k||_{2,2} + ||k eta_k||_{1,2}) / (||f_k||_2 + ||h_k||_2) at time index k.
double energy_estimate_ratio(const SpectralField& u, const PlateField& eta, const SpectralField& f,
                             const PlateField& h, int k);

struct SolutionFields {
  SpectralField u;
  SpectralField p;
  PlateField eta;
};

/// Assemble per-mode solutions into fields; every lattice mode must be present.
SolutionFields synthesize(const TorusGrid& grid, const std::vector<ModeSolution>& modes);

ModeData mode_data(const SpectralField& f, const SpectralField& g, const PlateField& h, const ModeIndex& m);

/// Direct path: every mode solved with its own (f, g, h).
SolutionFields solve_modes(const ModeSolver& solver, const SpectralField& f, const SpectralField& g,
                           const PlateField& h);

/// Physical-grid max residuals of the linear system.
struct LinearResidual {
  double momentum = 0.0, continuity = 0.0, bc_bottom = 0.0, bc_top = 0.0, plate = 0.0, plate_mean = 0.0;
  double max() const;
};

LinearResidual linear_residual(const SolutionFields& s, const SpectralField& f, const SpectralField& g,
                               const PlateField& h, double mu_f, double mu_s);

struct LinearSolution {
  SolutionFields fields;
  SpectralField lift;  // w with div w = g
  LinearResidual residual;
  double x_norm = 0.0;
  double y_norm = 0.0;
  double apriori_ratio = 0.0;  // X / Y, 0 for zero data
};

/// Lift g, reduce to g = 0, solve steady and oscillatory parts, add the lift back.
LinearSolution solve_linear_full(const ModeSolver& solver, const SpectralField& f, const SpectralField& g,
                                 const PlateField& h, double q = 2.0);
LinearSolution solve_linear_full(const SpectralField& f, const SpectralField& g, const PlateField& h,
                                 const SolverConfig& cfg);

}  // namespace plateflow
