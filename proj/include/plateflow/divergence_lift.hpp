#pragma once

#include <map>
#include <memory>
#include <mutex>

#include "plateflow/spectral_field.hpp"

namespace plateflow {

struct LiftResult {
  SpectralField w;
  double residual_div = 0.0;  // max |div w - g| on the physical grid
  double residual_bc = 0.0;   // max |w| on both faces
};

/// Right inverse of the divergence with zero boundary values, built mode by mode.
/// For xi' != 0: w' = i xi' phi, w3 = psi with (phi, psi, pi) solving
///   (|xi'|^2 - D^2) phi + pi = 0,  (|xi'|^2 - D^2) psi + D pi = 0   (interior nodes)
///   -|xi'|^2 phi + D psi = g                                        (all nodes)
///   phi = psi = 0 at x3 = 0, 1,
/// i.e. the steady Stokes field with divergence g. For xi' = 0: w' = 0 and
/// w3 = int_0^x3 g. The operator does not depend on k, so d/dt commutes with it.
class DivergenceLift {
 public:
  explicit DivergenceLift(const TorusGrid& grid, double compat_tol = 1e-9);

  /// Throws IncompatibleData when some time mode of g has nonzero mean.
  LiftResult lift(const SpectralField& g) const;
  /// Lift of one mode profile (no compatibility check); returns nodes x 3.
  Eigen::MatrixXcd lift_mode(const ModeIndex& m, const Eigen::VectorXcd& g) const;

  const TorusGrid& grid() const { return grid_; }

 private:
  struct Factor;
  std::shared_ptr<const Factor> factor(long n2) const;

  TorusGrid grid_;
  double compat_tol_;
  mutable std::mutex mutex_;
  mutable std::map<long, std::shared_ptr<const Factor>> cache_;
};

LiftResult lift_divergence(const SpectralField& g, double compat_tol = 1e-9);

/// Throws IncompatibleData(k) if |int_0^1 g(k, 0, x3) dx3| exceeds tol (1 + max |g|).
void check_mean_free(const SpectralField& g, double tol);

struct LiftRatios {
  double gradient = 0.0;  // ||grad w||_q / ||g||_q
  double negative = 0.0;  // ||w||_q / ||g||_{-1,q}
};

LiftRatios lift_estimate_check(const SpectralField& g, const SpectralField& w, double q);

/// (sum_j ||d_j u||_q^q)^{1/q} over all components.
double gradient_norm(const SpectralField& u, double q);

}  // namespace plateflow
