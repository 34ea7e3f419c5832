#include "plateflow/divergence_lift.hpp"

#include <cmath>

#include "plateflow/errors.hpp"
#include "plateflow/norms.hpp"
#include "plateflow/parallel.hpp"
#include "refined_lu.hpp"

namespace plateflow {

struct DivergenceLift::Factor {
  RefinedLU<cplx> lu;
};

DivergenceLift::DivergenceLift(const TorusGrid& grid, double compat_tol) : grid_(grid), compat_tol_(compat_tol) {}

std::shared_ptr<const DivergenceLift::Factor> DivergenceLift::factor(long n2) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(n2);
  if (it != cache_.end()) return it->second;

  const ChebyshevBasis& b = grid_.cheb();
  const int n = b.size(), N = b.degree;
  const double s2 = grid_.wavenumber(1) * grid_.wavenumber(1) * static_cast<double>(n2);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd helm = s2 * id - b.d2;
  // unknowns [phi; psi; pi]
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  a.block(0, 0, n, n) = helm;
  a.block(0, 2 * n, n, n) = id;
  a.block(n, n, n, n) = helm;
  a.block(n, 2 * n, n, n) = b.d1;
  a.block(2 * n, 0, n, n) = -s2 * id;
  a.block(2 * n, n, n, n) = b.d1;
  for (int blk = 0; blk < 2; ++blk) {
    a.row(blk * n).setZero();
    a(blk * n, blk * n) = 1.0;
    a.row(blk * n + N).setZero();
    a(blk * n + N, blk * n + N) = 1.0;
  }
  auto f = std::make_shared<Factor>();
  f->lu.compute(a.cast<cplx>());
  cache_.emplace(n2, f);
  return f;
}

Eigen::MatrixXcd DivergenceLift::lift_mode(const ModeIndex& m, const Eigen::VectorXcd& g) const {
  const ChebyshevBasis& b = grid_.cheb();
  const int n = b.size();
  Eigen::MatrixXcd w = Eigen::MatrixXcd::Zero(n, 3);
  if (m.lateral_zero()) {
    w.col(2) = b.zero_end_integral * g;
    return w;
  }
  const long n2 = static_cast<long>(m.m1) * m.m1 + static_cast<long>(m.m2) * m.m2;
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(3 * n);
  rhs.tail(n) = g;
  const Eigen::VectorXcd sol = factor(n2)->lu.solve(rhs);
  const Eigen::VectorXcd phi = sol.head(n);
  w.col(0) = I * grid_.wavenumber(m.m1) * phi;
  w.col(1) = I * grid_.wavenumber(m.m2) * phi;
  w.col(2) = sol.segment(n, n);
  return w;
}

void check_mean_free(const SpectralField& g, double tol) {
  const TorusGrid& gr = g.grid();
  const double scale = 1.0 + g.max_abs();
  for (int k = -gr.kt_max(); k <= gr.kt_max(); ++k) {
    const cplx mean = cheb_integral(gr.cheb(), g.profile({k, 0, 0}));
    if (std::abs(mean) > tol * scale)
      throw IncompatibleData(k, "divergence data has nonzero mean " + std::to_string(std::abs(mean)) +
                                    " at time mode k = " + std::to_string(k));
  }
}

LiftResult DivergenceLift::lift(const SpectralField& g) const {
  if (g.components() != 1) throw Error(ErrorKind::shape, "lift needs scalar divergence data");
  check_mean_free(g, compat_tol_);
  SpectralField w(grid_, 3, g.is_real());
  const std::size_t count = grid_.mode_count();
  std::vector<Eigen::MatrixXcd> modes(count);
  parallel_for(count, [&](std::size_t o) {
    const ModeIndex m = grid_.mode_at(o);
    modes[o] = lift_mode(m, g.profile(m));
  });
  for (std::size_t o = 0; o < count; ++o) {
    const ModeIndex m = grid_.mode_at(o);
    for (int c = 0; c < 3; ++c) w.set_profile(m, c, modes[o].col(c));
  }
  LiftResult r{w, 0.0, 0.0};
  r.residual_div = inverse_transform(divergence(w) - g).max_abs();
  for (int c = 0; c < 3; ++c) {
    r.residual_bc = std::max(r.residual_bc, inverse_transform_plate(trace_bottom(w, c)).max_abs());
    r.residual_bc = std::max(r.residual_bc, inverse_transform_plate(trace_top(w, c)).max_abs());
  }
  return r;
}

LiftResult lift_divergence(const SpectralField& g, double compat_tol) {
  return DivergenceLift(g.grid(), compat_tol).lift(g);
}

double gradient_norm(const SpectralField& u, double q) {
  double acc = 0.0;
  for (int axis = 1; axis <= 3; ++axis) acc += std::pow(lq_norm(u.dx(axis), q), q);
  return std::pow(acc, 1.0 / q);
}

LiftRatios lift_estimate_check(const SpectralField& g, const SpectralField& w, double q) {
  LiftRatios r;
  const double gq = lq_norm(g, q);
  const double gneg = negative_norm_time(g, 0.0, q);
  if (gq > 0.0) r.gradient = gradient_norm(w, q) / gq;
  if (gneg > 0.0) r.negative = lq_norm(w, q) / gneg;
  return r;
}

}  // namespace plateflow
