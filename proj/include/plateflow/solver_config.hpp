#pragma once

#include "plateflow/grid.hpp"

namespace plateflow {

struct SolverConfig {
  double period_t = two_pi;
  double period_x = two_pi;
  double mu_f = 1.0;
  double mu_s = 1.0;
  int nt = 5;
  int nx = 5;
  int nz = 24;

  double tol_eq = 1e-9;
  double tol_bc = 1e-9;
  double tol_nl = 1e-9;
  double picard_tol = 1e-13;
  int max_iter = 30;
  double eps0 = 0.1;  // smallness radius of the deformation gate
  bool dealias = true;
  double q = 2.0;     // exponent of the control norms
  bool check_residuals = true;

  TorusGrid grid() const { return TorusGrid(nt, nx, nz, period_t, period_x); }
};

}  // namespace plateflow
