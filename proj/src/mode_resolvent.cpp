#include "plateflow/mode_resolvent.hpp"

#include <cmath>

#include "plateflow/divergence_lift.hpp"
#include "plateflow/errors.hpp"
#include "plateflow/norms.hpp"
#include "plateflow/parallel.hpp"
#include "refined_lu.hpp"

namespace plateflow {

cplx plate_symbol_damped(double omega, double xi2, double mu_s) {
  return cplx(xi2 * xi2 - omega * omega, omega * mu_s * xi2);
}

cplx plate_symbol_damped(const TorusGrid& grid, const ModeIndex& m, double mu_s) {
  return plate_symbol_damped(grid.omega(m.k), grid.xi_norm2(m.m1, m.m2), mu_s);
}

ModeData apply_mode_operator(const TorusGrid& grid, double mu_f, double mu_s, const ModeIndex& m,
                             const ModeSolution& s) {
  const ChebyshevBasis& b = grid.cheb();
  const double om = grid.omega(m.k), xi1 = grid.wavenumber(m.m1), xi2 = grid.wavenumber(m.m2);
  const double s2 = xi1 * xi1 + xi2 * xi2;
  ModeData d = ModeData::zero(b.size());
  const cplx c0 = I * om + mu_f * s2;
  for (int c = 0; c < 3; ++c) d.f.col(c) = c0 * s.u.col(c) - mu_f * (b.d2 * s.u.col(c));
  d.f.col(0) += I * xi1 * s.p;
  d.f.col(1) += I * xi2 * s.p;
  d.f.col(2) += b.d1 * s.p;
  const Eigen::VectorXcd du3 = b.d1 * s.u.col(2);
  d.g = I * xi1 * s.u.col(0) + I * xi2 * s.u.col(1) + du3;
  d.h = plate_symbol_damped(om, s2, mu_s) * s.eta - s.p(0) + 2.0 * mu_f * du3(0);
  return d;
}

ModeResidual mode_residual(const TorusGrid& grid, double mu_f, double mu_s, const ModeIndex& m,
                           const ModeSolution& s, const ModeData& d) {
  const ModeData a = apply_mode_operator(grid, mu_f, mu_s, m, s);
  const int N = grid.nz();
  ModeResidual r;
  r.momentum = (a.f - d.f).middleRows(1, N - 1).cwiseAbs().maxCoeff();
  r.continuity = (a.g - d.g).cwiseAbs().maxCoeff();
  const double om = grid.omega(m.k);
  r.bc = std::max({std::abs(s.u(0, 0)), std::abs(s.u(0, 1)), std::abs(s.u(0, 2) + I * om * s.eta),
                   s.u.row(N).cwiseAbs().maxCoeff()});
  r.plate = std::abs(a.h - d.h);
  if (m.lateral_zero()) r.bc = std::max(r.bc, std::abs(s.eta));
  return r;
}

// ---------------------------------------------------------------- ModeSolver

struct ModeSolver::Factor {
  bool lateral_zero = false;
  // xi' != 0: [u_par; u3; p; eta] system and the perpendicular scalar problem
  RefinedLU<cplx> coupled;
  RefinedLU<cplx> perp;
  // xi' = 0: tangential two-point problem and the pressure system
  RefinedLU<cplx> tangential;
  RefinedLU<double> pressure;
};

ModeSolver::ModeSolver(const TorusGrid& grid, double mu_f, double mu_s, double tol_eq, bool check)
    : grid_(grid), mu_f_(mu_f), mu_s_(mu_s), tol_eq_(tol_eq), check_(check) {
  if (!(mu_f > 0.0)) throw Error(ErrorKind::config, "mu_f must be positive");
  if (!(mu_s > 0.0)) throw Error(ErrorKind::config, "the linear solver requires mu_s > 0");
}

ModeSolver::ModeSolver(const SolverConfig& cfg)
    : ModeSolver(cfg.grid(), cfg.mu_f, cfg.mu_s, cfg.tol_eq, cfg.check_residuals) {}

std::shared_ptr<const ModeSolver::Factor> ModeSolver::factor(const ModeIndex& m) const {
  const long n2 = static_cast<long>(m.m1) * m.m1 + static_cast<long>(m.m2) * m.m2;
  const std::pair<int, long> key{m.k, n2};
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;

  const ChebyshevBasis& b = grid_.cheb();
  const int n = b.size(), N = b.degree;
  const double om = grid_.omega(m.k);
  const double s2 = grid_.wavenumber(1) * grid_.wavenumber(1) * static_cast<double>(n2);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  const Eigen::MatrixXcd helm = (I * om + mu_f_ * s2) * id - mu_f_ * b.d2.cast<cplx>();
  auto f = std::make_shared<Factor>();

  if (n2 == 0) {
    f->lateral_zero = true;
    Eigen::MatrixXcd t = helm;
    t.row(0) = id.row(0);
    t.row(N) = id.row(N);
    f->tangential.compute(t);
    // rows: D p at interior nodes, top Chebyshev coefficient = 0, p(0)
    Eigen::MatrixXd pm(n, n);
    pm.row(0) = Eigen::RowVectorXd::Unit(n, 0);
    pm.middleRows(1, N - 1) = b.d1.middleRows(1, N - 1);
    pm.row(N) = b.to_coeffs.row(N);
    f->pressure.compute(pm);
  } else {
    const double s = std::sqrt(s2);
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(3 * n + 1, 3 * n + 1);
    a.block(0, 0, n, n) = helm;
    a.block(0, 2 * n, n, n) = I * s * id;
    a.block(n, n, n, n) = helm;
    a.block(n, 2 * n, n, n) = b.d1.cast<cplx>();
    a.block(2 * n, 0, n, n) = I * s * id;
    a.block(2 * n, n, n, n) = b.d1.cast<cplx>();
    for (int blk = 0; blk < 2; ++blk) {
      a.row(blk * n).setZero();
      a(blk * n, blk * n) = 1.0;
      a.row(blk * n + N).setZero();
      a(blk * n + N, blk * n + N) = 1.0;
    }
    a(n, 3 * n) = I * om;  // u3(0) + i omega eta = 0
    const int pr = 3 * n;
    a(pr, 3 * n) = plate_symbol_damped(om, s2, mu_s_);
    a(pr, 2 * n) = -1.0;
    a.block(pr, n, 1, n) += 2.0 * mu_f_ * b.d1.row(0).cast<cplx>();
    f->coupled.compute(a);

    Eigen::MatrixXcd t = helm;
    t.row(0) = id.row(0);
    t.row(N) = id.row(N);
    f->perp.compute(t);
  }
  cache_.emplace(key, f);
  return f;
}

ModeSolution ModeSolver::solve_lateral_zero(const ModeIndex& m, const ModeData& d, const Factor& fac) const {
  const ChebyshevBasis& b = grid_.cheb();
  const int n = b.size(), N = b.degree;
  const double om = grid_.omega(m.k);
  const cplx mean = cheb_integral(b, d.g);
  if (std::abs(mean) > tol_eq_ * (1.0 + d.g.cwiseAbs().maxCoeff()))
    throw IncompatibleData(m.k, "continuity data at xi' = 0 has nonzero mean at time mode k = " + std::to_string(m.k));
  ModeSolution s{m, Eigen::MatrixXcd::Zero(n, 3), Eigen::VectorXcd::Zero(n), cplx(0.0)};
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXcd rhs = d.f.col(c);
    rhs(0) = rhs(N) = 0.0;
    s.u.col(c) = fac.tangential.solve(rhs);
  }
  s.u.col(2) = b.zero_end_integral * d.g;
  const Eigen::VectorXcd du3 = b.d1 * s.u.col(2);
  const Eigen::VectorXcd dp = d.f.col(2) - I * om * s.u.col(2) + mu_f_ * (b.d2 * s.u.col(2));
  Eigen::VectorXcd rhs(n);
  rhs(0) = 2.0 * mu_f_ * du3(0) - d.h;
  rhs.segment(1, N - 1) = dp.segment(1, N - 1);
  rhs(N) = 0.0;
  s.p = fac.pressure.solve(rhs.real()).cast<cplx>() + I * fac.pressure.solve(rhs.imag()).cast<cplx>();
  return s;
}

ModeSolution ModeSolver::solve(const ModeIndex& m, const ModeData& d) const {
  if (!grid_.contains(m)) throw Error(ErrorKind::shape, "mode outside the lattice");
  const ChebyshevBasis& b = grid_.cheb();
  const int n = b.size(), N = b.degree;
  if (d.f.rows() != n || d.f.cols() != 3 || d.g.size() != n) throw Error(ErrorKind::shape, "mode data shape mismatch");
  const auto fac = factor(m);
  ModeSolution s;
  if (fac->lateral_zero) {
    s = solve_lateral_zero(m, d, *fac);
  } else {
    const double xi1 = grid_.wavenumber(m.m1), xi2 = grid_.wavenumber(m.m2);
    const double sn = std::sqrt(xi1 * xi1 + xi2 * xi2);
    const Eigen::VectorXcd fpar = (xi1 * d.f.col(0) + xi2 * d.f.col(1)) / sn;
    const Eigen::VectorXcd fperp = (-xi2 * d.f.col(0) + xi1 * d.f.col(1)) / sn;
    Eigen::VectorXcd rhs(3 * n + 1);
    rhs.segment(0, n) = fpar;
    rhs.segment(n, n) = d.f.col(2);
    rhs.segment(2 * n, n) = d.g;
    rhs(3 * n) = d.h;
    rhs(0) = rhs(N) = rhs(n) = rhs(n + N) = 0.0;
    const Eigen::VectorXcd x = fac->coupled.solve(rhs);
    Eigen::VectorXcd rp = fperp;
    rp(0) = rp(N) = 0.0;
    const Eigen::VectorXcd v = fac->perp.solve(rp);
    const Eigen::VectorXcd a = x.segment(0, n);
    s.mode = m;
    s.u.resize(n, 3);
    s.u.col(0) = (xi1 * a - xi2 * v) / sn;
    s.u.col(1) = (xi2 * a + xi1 * v) / sn;
    s.u.col(2) = x.segment(n, n);
    s.p = x.segment(2 * n, n);
    s.eta = x(3 * n);
  }
  if (check_) {
    const ModeResidual r = mode_residual(grid_, mu_f_, mu_s_, m, s, d);
    const double scale = 1.0 + d.f.cwiseAbs().maxCoeff() + d.g.cwiseAbs().maxCoeff() + std::abs(d.h) +
                         b.d2.cwiseAbs().rowwise().sum().maxCoeff() * s.u.cwiseAbs().maxCoeff() +
                         b.d1.cwiseAbs().rowwise().sum().maxCoeff() * s.p.cwiseAbs().maxCoeff();
    if (r.max() > tol_eq_ * scale)
      throw Error(ErrorKind::solver, "mode (" + std::to_string(m.k) + ", " + std::to_string(m.m1) + ", " +
                                         std::to_string(m.m2) + ") residual " + std::to_string(r.max()) +
                                         " exceeds tolerance");
  }
  return s;
}

ModeSolution solve_oscillatory_mode(const TorusGrid& grid, const SolverConfig& cfg, const ModeIndex& m,
                                    const ModeData& d) {
  if (m.k == 0) throw Error(ErrorKind::wrong_entry, "k = 0 belongs to the steady solver");
  return ModeSolver(grid, cfg.mu_f, cfg.mu_s, cfg.tol_eq, cfg.check_residuals).solve(m, d);
}

ModeSolution solve_steady_mode(const TorusGrid& grid, const SolverConfig& cfg, int m1, int m2, const ModeData& d) {
  return ModeSolver(grid, cfg.mu_f, cfg.mu_s, cfg.tol_eq, cfg.check_residuals).solve({0, m1, m2}, d);
}

// ---------------------------------------------------------------- weak form

TestPair make_test_pair(const TorusGrid& grid, const ModeIndex& m, cplx zeta, cplx a, cplx c) {
  const Eigen::VectorXd& x = grid.x3();
  const int n = grid.nodes();
  const double om = grid.omega(m.k), xi1 = grid.wavenumber(m.m1), xi2 = grid.wavenumber(m.m2);
  TestPair t{Eigen::MatrixXcd::Zero(n, 3), cplx(0.0)};
  if (m.lateral_zero()) {
    for (int j = 0; j < n; ++j) {
      const double bub = x(j) * (1.0 - x(j));
      t.w(j, 0) = a * bub;
      t.w(j, 1) = c * bub;
    }
    return t;
  }
  t.zeta = zeta;
  const double s2 = xi1 * xi1 + xi2 * xi2;
  for (int j = 0; j < n; ++j) {
    const double y = x(j);
    const cplx w3 = -I * om * zeta * (1.0 - 3.0 * y * y + 2.0 * y * y * y) + a * y * y * (1.0 - y) * (1.0 - y);
    const cplx dw3 = -I * om * zeta * (-6.0 * y + 6.0 * y * y) + a * (2.0 * y - 6.0 * y * y + 4.0 * y * y * y);
    const double bub = y * (1.0 - y);
    t.w(j, 0) = I * xi1 * dw3 / s2 - xi2 * c * bub;
    t.w(j, 1) = I * xi2 * dw3 / s2 + xi1 * c * bub;
    t.w(j, 2) = w3;
  }
  return t;
}

cplx weak_form_B(const TorusGrid& grid, double mu_f, double mu_s, const ModeIndex& m, const Eigen::MatrixXcd& u,
                 cplx eta, const TestPair& test) {
  const ChebyshevBasis& b = grid.cheb();
  const double om = grid.omega(m.k), s2 = grid.xi_norm2(m.m1, m.m2);
  const cplx ez = eta * std::conj(test.zeta);
  cplx v = I * om * om * om * ez - I * om * s2 * s2 * ez + mu_s * om * om * s2 * ez;
  for (int c = 0; c < 3; ++c) {
    const Eigen::VectorXcd du = b.d1 * u.col(c), dw = b.d1 * test.w.col(c);
    v += mu_f * (cheb_inner(b, du, dw) + s2 * cheb_inner(b, u.col(c), test.w.col(c)));
    v += I * om * cheb_inner(b, u.col(c), test.w.col(c));
  }
  return v;
}

cplx weak_form_rhs(const TorusGrid& grid, const ModeIndex& m, const ModeData& d, const TestPair& test) {
  const ChebyshevBasis& b = grid.cheb();
  cplx v = -I * grid.omega(m.k) * d.h * std::conj(test.zeta);
  for (int c = 0; c < 3; ++c) v += cheb_inner(b, d.f.col(c), test.w.col(c));
  return v;
}

double energy_estimate_ratio(const SpectralField& u, const PlateField& eta, const SpectralField& f,
                             const PlateField& h, int k) {
  const TorusGrid& g = u.grid();
  const ChebyshevBasis& b = g.cheb();
  const double om = g.omega(k);
  double u2 = 0.0, e22 = 0.0, e12 = 0.0, f2 = 0.0, h2 = 0.0;
  for (int m1 = -g.kx_max(); m1 <= g.kx_max(); ++m1)
    for (int m2 = -g.kx_max(); m2 <= g.kx_max(); ++m2) {
      const ModeIndex m{k, m1, m2};
      const double s2 = g.xi_norm2(m1, m2);
      for (int c = 0; c < 3; ++c) {
        const Eigen::VectorXcd p = u.profile(m, c);
        const Eigen::VectorXcd dp = b.d1 * p;
        u2 += (1.0 + s2) * cheb_inner(b, p, p).real() + cheb_inner(b, dp, dp).real();
        const Eigen::VectorXcd fp = f.profile(m, c);
        f2 += cheb_inner(b, fp, fp).real();
      }
      const double ae = std::norm(eta(m));
      e22 += (1.0 + s2 + s2 * s2) * ae;
      e12 += om * om * (1.0 + s2) * ae;
      h2 += std::norm(h(m));
    }
  const double rhs = std::sqrt(f2) + std::sqrt(h2);
  if (rhs == 0.0) return 0.0;
  return (std::sqrt(u2) + std::sqrt(e22) + std::sqrt(e12)) / rhs;
}

// ---------------------------------------------------------------- synthesis and pipelines

SolutionFields synthesize(const TorusGrid& grid, const std::vector<ModeSolution>& modes) {
  SolutionFields out{SpectralField(grid, 3), SpectralField(grid, 1), PlateField(grid)};
  std::vector<char> seen(grid.mode_count(), 0);
  for (const ModeSolution& s : modes) {
    if (!grid.contains(s.mode)) throw Error(ErrorKind::shape, "mode solution outside the lattice");
    const std::size_t o = grid.mode_offset(s.mode.k, s.mode.m1, s.mode.m2);
    seen[o] = 1;
    for (int c = 0; c < 3; ++c) out.u.set_profile(s.mode, c, s.u.col(c));
    out.p.set_profile(s.mode, 0, s.p);
    out.eta(s.mode) = s.eta;
  }
  for (std::size_t o = 0; o < seen.size(); ++o)
    if (!seen[o]) {
      const ModeIndex m = grid.mode_at(o);
      throw Error(ErrorKind::incomplete, "missing mode (" + std::to_string(m.k) + ", " + std::to_string(m.m1) + ", " +
                                             std::to_string(m.m2) + ") in synthesis");
    }
  const bool real = out.u.conjugate_symmetry_error() < 1e-12 && out.p.conjugate_symmetry_error() < 1e-12 &&
                    out.eta.conjugate_symmetry_error() < 1e-12;
  out.u.set_real(real);
  out.p.set_real(real);
  out.eta.set_real(real);
  return out;
}

ModeData mode_data(const SpectralField& f, const SpectralField& g, const PlateField& h, const ModeIndex& m) {
  ModeData d;
  d.f.resize(f.nodes(), 3);
  for (int c = 0; c < 3; ++c) d.f.col(c) = f.profile(m, c);
  d.g = g.profile(m, 0);
  d.h = h(m);
  return d;
}

namespace {

std::vector<ModeSolution> solve_subset(const ModeSolver& solver, const SpectralField& f, const SpectralField& g,
                                       const PlateField& h, bool steady, bool oscillatory) {
  const TorusGrid& grid = solver.grid();
  std::vector<ModeSolution> out(grid.mode_count());
  const int n = grid.nodes();
  parallel_for(grid.mode_count(), [&](std::size_t o) {
    const ModeIndex m = grid.mode_at(o);
    const bool take = (m.k == 0) ? steady : oscillatory;
    if (take) {
      out[o] = solver.solve(m, mode_data(f, g, h, m));
    } else {
      out[o] = ModeSolution{m, Eigen::MatrixXcd::Zero(n, 3), Eigen::VectorXcd::Zero(n), cplx(0.0)};
    }
  });
  return out;
}

}  // namespace

SolutionFields solve_modes(const ModeSolver& solver, const SpectralField& f, const SpectralField& g,
                           const PlateField& h) {
  SolutionFields s = synthesize(solver.grid(), solve_subset(solver, f, g, h, true, true));
  return s;
}

double LinearResidual::max() const {
  return std::max({momentum, continuity, bc_bottom, bc_top, plate, plate_mean});
}

LinearResidual linear_residual(const SolutionFields& s, const SpectralField& f, const SpectralField& g,
                               const PlateField& h, double mu_f, double mu_s) {
  const TorusGrid& grid = s.u.grid();
  const int N = grid.nz();
  SpectralField mom(grid, 3), cont(grid, 1), bcb(grid, 3), bct(grid, 3);
  PlateField plate(grid), mean(grid);
  for (std::size_t o = 0; o < grid.mode_count(); ++o) {
    const ModeIndex m = grid.mode_at(o);
    ModeSolution ms{m, Eigen::MatrixXcd(grid.nodes(), 3), s.p.profile(m), s.eta(m)};
    for (int c = 0; c < 3; ++c) ms.u.col(c) = s.u.profile(m, c);
    const ModeData a = apply_mode_operator(grid, mu_f, mu_s, m, ms);
    for (int c = 0; c < 3; ++c) {
      Eigen::VectorXcd r = a.f.col(c) - f.profile(m, c);
      r(0) = r(N) = 0.0;
      mom.set_profile(m, c, r);
      Eigen::VectorXcd bb = Eigen::VectorXcd::Zero(grid.nodes());
      bb(0) = ms.u(0, c) + (c == 2 ? I * grid.omega(m.k) * ms.eta : cplx(0.0));
      bcb.set_profile(m, c, bb);
      Eigen::VectorXcd bt = Eigen::VectorXcd::Zero(grid.nodes());
      bt(N) = ms.u(N, c);
      bct.set_profile(m, c, bt);
    }
    cont.set_profile(m, 0, a.g - g.profile(m));
    plate(m) = a.h - h(m);
    if (m.lateral_zero()) mean(m) = ms.eta;
  }
  LinearResidual r;
  r.momentum = inverse_transform(mom).max_abs();
  r.continuity = inverse_transform(cont).max_abs();
  r.bc_bottom = inverse_transform(bcb).max_abs();
  r.bc_top = inverse_transform(bct).max_abs();
  r.plate = inverse_transform_plate(plate).max_abs();
  r.plate_mean = inverse_transform_plate(mean).max_abs();
  return r;
}

LinearSolution solve_linear_full(const ModeSolver& solver, const SpectralField& f, const SpectralField& g,
                                 const PlateField& h, double q) {
  const TorusGrid& grid = solver.grid();
  if (f.components() != 3 || g.components() != 1) throw Error(ErrorKind::shape, "expected f with 3 and g with 1 component");
  if (!(f.grid() == grid) || !(g.grid() == grid)) throw Error(ErrorKind::shape, "data grid differs from the solver grid");
  const double mu = solver.mu_f();
  const LiftResult lift = DivergenceLift(grid).lift(g);
  const SpectralField& w = lift.w;

  // f~ = f - dt w + mu (D^2 - |xi'|^2) w,  h~ = h - 2 mu (D w3)(0)
  SpectralField ft = f - w.dt();
  PlateField ht = h;
  const ChebyshevBasis& b = grid.cheb();
  for (std::size_t o = 0; o < grid.mode_count(); ++o) {
    const ModeIndex m = grid.mode_at(o);
    const double s2 = grid.xi_norm2(m.m1, m.m2);
    for (int c = 0; c < 3; ++c) {
      const Eigen::VectorXcd wc = w.profile(m, c);
      ft.add_profile(m, c, mu * (b.d2 * wc - s2 * wc));
    }
    const Eigen::VectorXcd w3 = w.profile(m, 2);
    ht(m) -= 2.0 * mu * b.d1.row(0).cast<cplx>().dot(w3);
  }
  ft.set_real(f.is_real() && g.is_real());
  ht.set_real(h.is_real() && g.is_real());

  const SpectralField zero_g(grid, 1, true);
  const SpectralField fs = project_steady(ft), fo = project_oscillatory(ft);
  const PlateField hs = project_steady(ht), ho = project_oscillatory(ht);
  const SolutionFields steady = synthesize(grid, solve_subset(solver, fs, zero_g, hs, true, false));
  const SolutionFields osc = synthesize(grid, solve_subset(solver, fo, zero_g, ho, false, true));

  LinearSolution out{{steady.u + osc.u + w, steady.p + osc.p, steady.eta + osc.eta}, w, {}, 0.0, 0.0, 0.0};
  const bool real = f.is_real() && g.is_real() && h.is_real();
  out.fields.u.set_real(real);
  out.fields.p.set_real(real);
  out.fields.eta.set_real(real);
  out.residual = linear_residual(out.fields, f, g, h, solver.mu_f(), solver.mu_s());
  out.x_norm = x_norm(out.fields.u, out.fields.p, out.fields.eta, q);
  out.y_norm = y_norm(f, g, h, q);
  out.apriori_ratio = out.y_norm > 0.0 ? out.x_norm / out.y_norm : 0.0;
  return out;
}

LinearSolution solve_linear_full(const SpectralField& f, const SpectralField& g, const PlateField& h,
                                 const SolverConfig& cfg) {
  return solve_linear_full(ModeSolver(cfg), f, g, h, cfg.q);
}

}  // namespace plateflow
