#pragma once

#include <array>
#include <functional>
#include <json.hpp>
#include <optional>
#include <vector>

#include "plateflow/errors.hpp"
#include "plateflow/mode_resolvent.hpp"

namespace plateflow {

/// Smallest odd lattice size that dealiases quadratic products of n modes (2/3 rule).
int dealias_size(int n);

/// eta(t, x') at an arbitrary point.
cplx evaluate_plate(const PlateField& eta, double t, double x1, double x2);

/// phi_eta: (x', x3) -> (x', x3 - (1 - x3) eta) and its inverse y3 -> (y3 + eta) / (1 + eta).
/// Construction checks sup |eta| < 1 on the padded lattice.
class Deformation {
 public:
  explicit Deformation(const PlateField& eta);
  Eigen::Vector3d map(double t, const Eigen::Vector3d& x) const;
  Eigen::Vector3d inverse(double t, const Eigen::Vector3d& y) const;
  double sup_eta() const { return sup_; }

 private:
  PlateField eta_;
  double sup_;
};

Eigen::Vector3d deform_map(const PlateField& eta, double t, const Eigen::Vector3d& x);
Eigen::Vector3d deform_inverse(const PlateField& eta, double t, const Eigen::Vector3d& y);

/// Entries of E o phi_eta, row-major (i, j); rows 1 and 2 are identically zero.
/// Evaluated on the dealiased lattice and projected back onto the grid.
std::array<SpectralField, 9> e_matrix(const PlateField& eta, bool dealias = true);

/// Unit normal (grad' eta, -1) / sqrt(1 + |grad' eta|^2) on the padded lattice (3 components).
Samples normal_vector(const PlateField& eta, bool dealias = true);

struct NonlinearTerms {
  SpectralField Rf_tilde;    // R_f - (u . grad) u
  SpectralField convective;  // (u . grad) u
  SpectralField Rd_vector;   // R_d
  SpectralField Rd_tilde;    // div R_d
  PlateField R_eta;
  std::array<PlateField, 9> S_eta;  // boundary tensor, row-major
};

/// Pullback terms of the momentum, continuity and plate equations in the reference slab.
/// Products are evaluated on the padded lattice (Chebyshev nodes in x3) and projected back.
NonlinearTerms compute_nonlinear_terms(const SpectralField& u, const SpectralField& p, const PlateField& eta,
                                       double mu_f = 1.0, bool dealias = true);

struct SmallnessReport {
  bool pass = true;
  double s_norm = 0.0;       // ||eta||_S
  double sup_eta = 0.0;
  double sup_inverse = 0.0;  // ||1 / (1 + eta)||_inf
  double margin = 0.0;       // eps0 - s_norm
  std::string failed;        // first violated condition
};

SmallnessReport smallness_check(const PlateField& eta, double eps0, double q = 2.0);

struct BoundRatios {
  double Rf = 0.0;  // ||R~_f||_q / [((1 + eps0)|u| + |grad p|_q + |u|^2) |eta|_S]
  double Rd = 0.0;  // ||R~_d||_{L^q(W^1) + W^{1,q}(W^-1)} / (|u| |eta|_S)
  double Reta = 0.0;  // ||R_eta||_{1-1/q} / [(1 + eps0)(|eta|_S |u| + |u| + |p|_{L^q(W^1)})]
  double E = 0.0;   // ||E||_q / ||eta||_{L^q(W^{1,q})}
};

/// |u| is the parabolic W^{1,2,q} norm. Zero denominators give 0.
BoundRatios nonlinear_bound_ratios(const SpectralField& u, const SpectralField& p, const PlateField& eta,
                                   double eps0 = 0.1, double q = 2.0, double mu_f = 1.0, bool dealias = true);

/// Momentum forcing: a closed-form Eulerian field composed with phi_eta, or a
/// coefficient field already given on the reference slab.
class Forcing {
 public:
  using Function = std::function<void(double t, double x1, double x2, double y3, double* out)>;

  static Forcing zero(const TorusGrid& grid);
  static Forcing from_field(const SpectralField& f);
  static Forcing from_function(const TorusGrid& grid, Function fn);

  /// f o phi_eta on the grid.
  SpectralField pullback(const PlateField& eta, bool dealias = true) const;
  const TorusGrid& grid() const { return grid_; }

 private:
  explicit Forcing(const TorusGrid& g) : grid_(g), field_(g, 3, true) {}
  TorusGrid grid_;
  SpectralField field_;
  Function fn_;
};

struct NonlinearResidual {
  LinearResidual equations;  // of the system with data (f~ + R~_f, R~_d, h + R_eta)
  double max() const { return equations.max(); }
};

NonlinearResidual nonlinear_residual(const SpectralField& u, const SpectralField& p, const PlateField& eta,
                                     const SpectralField& f_tilde, const PlateField& h, double mu_f, double mu_s,
                                     bool dealias = true);

struct PicardStep {
  int iteration = 0;
  double x_norm = 0.0;
  double step = 0.0;   // ||x_n - x_{n-1}||_X
  double ratio = 0.0;  // step_n / step_{n-1}, 0 for the first step
  double s_norm = 0.0;
  double sup_eta = 0.0;
  double linear_residual = 0.0;
  double seconds = 0.0;
};

struct PicardResult {
  SolutionFields fields;
  std::vector<PicardStep> trace;
  bool converged = false;
  double epsilon = 0.0;  // ||f||_q + ||h||_{1-1/q}
  double radius = 0.0;   // sqrt(epsilon)
  NonlinearResidual residual;

  nlohmann::json trace_json() const;
};

class PicardDivergence : public Error {
 public:
  PicardDivergence(const std::string& msg, nlohmann::json trace)
      : Error(ErrorKind::divergence, msg), trace(std::move(trace)) {}
  nlohmann::json trace;
};

/// x_{n+1} = S(f~(eta_n) + R~_f(x_n), R~_d(x_n), h + R_eta(x_n)) from x_0 = 0, S the full linear solve.
PicardResult picard_solve(const Forcing& f, const PlateField& h, const SolverConfig& cfg);
PicardResult picard_solve(const ModeSolver& solver, const Forcing& f, const PlateField& h, const SolverConfig& cfg);

}  // namespace plateflow
