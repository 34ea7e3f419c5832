#include <cmath>
#include <random>

#include "doctest.h"
#include "plateflow/errors.hpp"
#include "plateflow/mode_resolvent.hpp"
#include "plateflow/norms.hpp"
#include "plateflow/validation.hpp"
#include "test_support.hpp"

using namespace plateflow;

namespace {

SolverConfig small_config(int nt, int nx, int nz) {
  SolverConfig c;
  c.nt = nt;
  c.nx = nx;
  c.nz = nz;
  return c;
}

// composite Simpson on [0, 1]
template <typename F>
cplx simpson(F&& fn, int n = 4000) {
  const double h = 1.0 / n;
  cplx acc = fn(0.0) + fn(1.0);
  for (int i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * fn(i * h);
  return acc * h / 3.0;
}

double mode_error(const ModeSolution& s, const ManufacturedCase::Mode& m, const Eigen::VectorXd& x) {
  double e = std::abs(s.eta - m.eta);
  for (int c = 0; c < 3; ++c) e = std::max(e, (s.u.col(c) - m.u[c].sample(x)).cwiseAbs().maxCoeff());
  return std::max(e, (s.p - m.p.sample(x)).cwiseAbs().maxCoeff());
}

double mode_scale(const ManufacturedCase::Mode& m, const Eigen::VectorXd& x) {
  double s = std::abs(m.eta);
  for (int c = 0; c < 3; ++c) s = std::max(s, m.u[c].sample(x).cwiseAbs().maxCoeff());
  return std::max(s, m.p.sample(x).cwiseAbs().maxCoeff());
}

ModeData sampled_data(const ManufacturedCase::Mode& m, const Eigen::VectorXd& x) {
  ModeData d = ModeData::zero(static_cast<int>(x.size()));
  for (int c = 0; c < 3; ++c) d.f.col(c) = m.f[c].sample(x);
  d.g = m.g.sample(x);
  d.h = m.h;
  return d;
}

}  // namespace

TEST_CASE("damped plate symbol") {
  CHECK(std::abs(plate_symbol_damped(1.0, 1.0, 1.0) - I) < 1e-15);
  CHECK(std::abs(plate_symbol_damped(0.0, 1.0, 1.0) - 1.0) < 1e-15);
  CHECK(std::abs(plate_symbol_damped(2.0, 2.0, 1.0) - 4.0 * I) < 1e-15);
  const TorusGrid g(5, 5, 8, two_pi, two_pi);
  CHECK(std::abs(plate_symbol_damped(g, {2, 1, 1}, 1.0) - 4.0 * I) < 1e-14);
}

TEST_CASE("entry points and trivial data") {
  const SolverConfig cfg = small_config(3, 3, 12);
  const TorusGrid g = cfg.grid();
  const ModeData z = ModeData::zero(g.nodes());
  CHECK_THROWS_AS(solve_oscillatory_mode(g, cfg, {0, 1, 0}, z), Error);
  const ModeSolution s = solve_oscillatory_mode(g, cfg, {1, 1, 0}, z);
  CHECK(s.u.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.p.cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.eta == 0.0);
  const ModeSolution st = solve_steady_mode(g, cfg, 0, 0, z);
  CHECK(st.u.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lateral-zero oscillatory mode with plate forcing only") {
  const SolverConfig cfg = small_config(3, 3, 12);
  const TorusGrid g = cfg.grid();
  ModeData d = ModeData::zero(g.nodes());
  d.h = 1.0;
  const ModeSolution s = solve_oscillatory_mode(g, cfg, {1, 0, 0}, d);
  CHECK(s.u.cwiseAbs().maxCoeff() < 1e-14);
  CHECK(s.eta == 0.0);
  CHECK((s.p.array() + 1.0).abs().maxCoeff() < 1e-12);
  d.g = Eigen::VectorXcd::Ones(g.nodes());
  CHECK_THROWS_AS(solve_oscillatory_mode(g, cfg, {1, 0, 0}, d), IncompatibleData);
}

TEST_CASE("steady plate forcing reduces to h / |xi'|^4") {
  const SolverConfig cfg = small_config(3, 5, 12);
  const TorusGrid g = cfg.grid();
  ModeData d = ModeData::zero(g.nodes());
  d.h = 1.0;
  const ModeSolution a = solve_steady_mode(g, cfg, 1, 0, d);
  CHECK(std::abs(a.eta - 1.0) < 1e-12);
  CHECK(a.u.cwiseAbs().maxCoeff() < 1e-12);
  const ModeSolution b = solve_steady_mode(g, cfg, 2, 0, d);
  CHECK(std::abs(b.eta - 1.0 / 16.0) < 1e-12);
}

TEST_CASE("manufactured mode recovery and spectral convergence") {
  ManufacturedOptions o;
  o.k_max = 2;
  o.m_max = 1;
  const ManufacturedCase mc = make_manufactured(17, o);
  CHECK(mc.constraint_residual() < 1e-14);
  double err8 = 0.0, err16 = 0.0, err32 = 0.0;
  for (int nz : {8, 16, 32}) {
    const TorusGrid g(5, 3, nz);
    const ModeSolver solver(g, 1.0, 1.0, 1e-9, false);
    double worst = 0.0;
    for (const auto& m : mc.modes) {
      const ModeSolution s = solver.solve(m.mode, sampled_data(m, g.x3()));
      worst = std::max(worst, mode_error(s, m, g.x3()) / mode_scale(m, g.x3()));
    }
    (nz == 8 ? err8 : nz == 16 ? err16 : err32) = worst;
  }
  MESSAGE("relative errors 8/16/32: " << err8 << " " << err16 << " " << err32);
  CHECK(err32 < 1e-9);
  CHECK(err8 / err16 >= 100.0);
}

TEST_CASE("computed modes satisfy the collocated equations") {
  const SolverConfig cfg = small_config(5, 5, 16);
  const TorusGrid g = cfg.grid();
  const ModeSolver solver(cfg);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (const ModeIndex m : {ModeIndex{1, 1, 0}, ModeIndex{2, -1, 2}, ModeIndex{0, 2, 1}, ModeIndex{-1, 0, 0}}) {
    ModeData d = ModeData::zero(g.nodes());
    for (int j = 0; j < g.nodes(); ++j)
      for (int c = 0; c < 3; ++c) d.f(j, c) = cplx(n(rng), n(rng));
    if (!m.lateral_zero()) {
      d.h = cplx(n(rng), n(rng));
      for (int j = 0; j < g.nodes(); ++j) d.g(j) = cplx(n(rng), n(rng));
    }
    const ModeSolution s = solver.solve(m, d);
    const ModeResidual r = mode_residual(g, 1.0, 1.0, m, s, d);
    CHECK(r.max() < 1e-9 * (1.0 + d.f.cwiseAbs().maxCoeff()));
    CHECK(std::abs(s.u(0, 2) + I * g.omega(m.k) * s.eta) < 1e-12);
    CHECK(s.u.row(g.nz()).cwiseAbs().maxCoeff() < 1e-12);
    if (m.lateral_zero()) CHECK(s.eta == 0.0);
  }
}

TEST_CASE("weak form: coercive real part and residual against test pairs") {
  const TorusGrid g(5, 5, 24);
  const ModeIndex m{2, 1, -1};
  const cplx zeta(0.3, -0.7), a(1.1, 0.2), c(-0.4, 0.5);
  const TestPair t = make_test_pair(g, m, zeta, a, c);
  CHECK(weak_form_B(g, 1.0, 1.0, m, Eigen::MatrixXcd::Zero(g.nodes(), 3), 0.0, t) == cplx(0.0));
  // independent oracle: |grad w|^2 of the closed-form test profiles by Simpson quadrature
  const double om = g.omega(m.k), x1 = g.wavenumber(m.m1), x2 = g.wavenumber(m.m2), s2 = x1 * x1 + x2 * x2;
  auto w3 = [&](double y) { return -I * om * zeta * (1.0 - 3 * y * y + 2 * y * y * y) + a * y * y * (1 - y) * (1 - y); };
  auto dw3 = [&](double y) { return -I * om * zeta * (-6 * y + 6 * y * y) + a * (2 * y - 6 * y * y + 4 * y * y * y); };
  auto d2w3 = [&](double y) { return -I * om * zeta * (-6.0 + 12 * y) + a * (2.0 - 12 * y + 12 * y * y); };
  auto bub = [](double y) { return y * (1 - y); };
  auto dbub = [](double y) { return 1 - 2 * y; };
  auto w1 = [&](double y) { return I * x1 * dw3(y) / s2 - x2 * c * bub(y); };
  auto w2 = [&](double y) { return I * x2 * dw3(y) / s2 + x1 * c * bub(y); };
  auto dw1 = [&](double y) { return I * x1 * d2w3(y) / s2 - x2 * c * dbub(y); };
  auto dw2 = [&](double y) { return I * x2 * d2w3(y) / s2 + x1 * c * dbub(y); };
  const double grad2 = simpson([&](double y) {
                         return cplx(std::norm(dw1(y)) + std::norm(dw2(y)) + std::norm(dw3(y)) +
                                     s2 * (std::norm(w1(y)) + std::norm(w2(y)) + std::norm(w3(y))));
                       }).real();
  const cplx self = weak_form_B(g, 1.0, 1.0, m, t.w, t.zeta, t);
  CHECK(std::abs(self.real() - (grad2 + om * om * s2 * std::norm(zeta))) < 1e-10 * grad2);
  // test pairs are divergence free with the right traces
  const Eigen::VectorXcd div = I * x1 * t.w.col(0) + I * x2 * t.w.col(1) + g.cheb().d1 * t.w.col(2);
  CHECK(div.cwiseAbs().maxCoeff() < 1e-11);
  CHECK(std::abs(t.w(0, 2) + I * om * zeta) < 1e-14);

  // residual of the weak formulation for a computed divergence-free solution
  ManufacturedOptions o;
  o.k_max = 2;
  o.m_max = 2;
  o.divergence_free = true;
  const ManufacturedCase mc = make_manufactured(5, o);
  const ModeSolver solver(g, 1.0, 1.0);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  for (const auto& mm : mc.modes) {
    if (mm.mode.k == 0) continue;
    const ModeData d = sampled_data(mm, g.x3());
    CHECK(d.g.cwiseAbs().maxCoeff() < 1e-12);
    const ModeSolution s = solver.solve(mm.mode, d);
    for (int r = 0; r < 10; ++r) {
      const TestPair tp = make_test_pair(g, mm.mode, cplx(n(rng), n(rng)), cplx(n(rng), n(rng)), cplx(n(rng), n(rng)));
      const cplx lhs = weak_form_B(g, 1.0, 1.0, mm.mode, s.u, s.eta, tp);
      const cplx rhs = weak_form_rhs(g, mm.mode, d, tp);
      const double scale = 1.0 + std::abs(lhs) + std::abs(rhs);
      worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
  }
  MESSAGE("weak-form relative residual " << worst);
  CHECK(worst < 1e-9);
}

TEST_CASE("boundary stress identity on the plate face") {
  // g = 0 and tangential velocity zero at x3 = 0: d3 u3(0) = -(d1 u1 + d2 u2)(0) = 0,
  // so the plate row sees p(0) alone
  const SolverConfig cfg = small_config(3, 3, 20);
  const TorusGrid g = cfg.grid();
  ManufacturedOptions o;
  o.divergence_free = true;
  const ManufacturedCase mc = make_manufactured(12, o);
  const ModeSolver solver(cfg);
  for (const auto& mm : mc.modes) {
    const ModeSolution s = solver.solve(mm.mode, sampled_data(mm, g.x3()));
    const cplx du3 = g.cheb().d1.row(0).cast<cplx>().dot(s.u.col(2));
    const cplx tangential = I * g.wavenumber(mm.mode.m1) * s.u(0, 0) + I * g.wavenumber(mm.mode.m2) * s.u(0, 1);
    CHECK(std::abs(du3 + tangential) < 1e-10);
    CHECK(std::abs(du3) < 1e-10);
  }
}

TEST_CASE("synthesis") {
  const TorusGrid g(3, 3, 6);
  std::vector<ModeSolution> modes;
  for (std::size_t o = 0; o < g.mode_count(); ++o)
    modes.push_back({g.mode_at(o), Eigen::MatrixXcd::Zero(g.nodes(), 3), Eigen::VectorXcd::Zero(g.nodes()), 0.0});
  modes[4].u(2, 1) = 3.0;
  const SolutionFields f = synthesize(g, modes);
  CHECK(f.u.coeffs().cwiseAbs().sum() == 3.0);
  CHECK(f.u(modes[4].mode.k, modes[4].mode.m1, modes[4].mode.m2, 2, 1) == 3.0);
  modes.pop_back();
  CHECK_THROWS_AS(synthesize(g, modes), Error);
}

TEST_CASE("full linear solve: zero data, residuals, linearity, manufactured recovery") {
  const SolverConfig cfg = small_config(5, 5, 24);
  const TorusGrid g = cfg.grid();
  const ModeSolver solver(cfg);
  const LinearSolution z = solve_linear_full(solver, SpectralField(g, 3, true), SpectralField(g, 1, true), PlateField(g, true));
  CHECK(z.fields.u.max_abs() == 0.0);
  CHECK(z.fields.p.max_abs() == 0.0);
  CHECK(z.fields.eta.max_abs() == 0.0);
  CHECK(z.apriori_ratio == 0.0);

  ManufacturedOptions o;
  o.k_max = 2;
  o.m_max = 2;
  const ManufacturedCase mc = make_manufactured(23, o);
  const auto F = mc.on_grid(g);
  const LinearSolution s = solve_linear_full(solver, F.f, F.g, F.h);
  CHECK(s.residual.max() < 1e-9);
  const double rel = x_norm(s.fields.u - F.u, s.fields.p - F.p, s.fields.eta - F.eta, 2.0) / x_norm(F.u, F.p, F.eta, 2.0);
  MESSAGE("manufactured relative X error " << rel);
  CHECK(rel < 1e-8);
  CHECK(s.fields.eta.lateral_mean_max() == 0.0);
  CHECK(s.fields.u.conjugate_symmetry_error() < 1e-12);
  CHECK(inverse_transform(s.fields.u).max_imag() < 1e-11);

  const ManufacturedCase mc2 = make_manufactured(24, o);
  const auto G = mc2.on_grid(g);
  const cplx al(0.7), be(-1.3);
  const LinearSolution c = solve_linear_full(solver, al * F.f + be * G.f, al * F.g + be * G.g, al * F.h + be * G.h);
  const LinearSolution s2 = solve_linear_full(solver, G.f, G.g, G.h);
  const SpectralField du = c.fields.u - (al * s.fields.u + be * s2.fields.u);
  CHECK(du.max_abs() < 1e-10 * (1.0 + c.fields.u.max_abs()));

  // g = 0: discrete divergence vanishes on the grid
  ManufacturedOptions od = o;
  od.divergence_free = true;
  const auto D = make_manufactured(25, od).on_grid(g);
  const LinearSolution sd = solve_linear_full(solver, D.f, D.g, D.h);
  CHECK(inverse_transform(divergence(sd.fields.u)).max_abs() < 1e-9);
}

TEST_CASE("energy estimate ratio") {
  const SolverConfig cfg = small_config(17, 5, 16);
  const TorusGrid g = cfg.grid();
  CHECK(energy_estimate_ratio(SpectralField(g, 3), PlateField(g), SpectralField(g, 3), PlateField(g), 1) == 0.0);
  const ModeSolver solver(cfg);
  double lo = INFINITY, hi = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const SpectralField f = test::random_field(g, 3, true, seed + 100);
    const PlateField h = test::random_plate(g, true, seed + 200);
    const SolutionFields s = solve_modes(solver, f, SpectralField(g, 1, true), h);
    for (int k = 1; k <= 8; ++k) {
      const double r = energy_estimate_ratio(s.u, s.eta, f, h, k);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  MESSAGE("energy ratio range " << lo << " .. " << hi);
  CHECK(hi < 10.0 * lo);
}
