#include <cmath>

#include "doctest.h"
#include "plateflow/errors.hpp"
#include "plateflow/nonlinear.hpp"
#include "plateflow/norms.hpp"
#include "test_support.hpp"

using namespace plateflow;

namespace {

// A cos(w . (t, x1, x2) + phase) * (p0 + p1 y + p2 y^2)
struct Separable {
  double A, w[3], phase, p[3];

  double arg(const double* s) const { return w[0] * s[0] + w[1] * s[1] + w[2] * s[2] + phase; }
  double poly(double y, int order) const {
    if (order == 0) return p[0] + p[1] * y + p[2] * y * y;
    if (order == 1) return p[1] + 2.0 * p[2] * y;
    return order == 2 ? 2.0 * p[2] : 0.0;
  }
  double value(const double* s, double y) const { return A * std::cos(arg(s)) * poly(y, 0); }
  // d/ds_a for a in {t, y1, y2}, then order derivatives in y3
  double d(const double* s, double y, int a, int order) const {
    return -A * w[a] * std::sin(arg(s)) * poly(y, order);
  }
  double dd(const double* s, double y, int a, int b) const {
    return -A * w[a] * w[b] * std::cos(arg(s)) * poly(y, 0);
  }
  double dy(const double* s, double y, int order) const { return A * std::cos(arg(s)) * poly(y, order); }
  // grad in (y1, y2, y3)
  double grad(const double* s, double y, int k) const { return k < 2 ? d(s, y, k + 1, 0) : dy(s, y, 1); }
  double laplace(const double* s, double y) const { return dd(s, y, 1, 1) + dd(s, y, 2, 2) + dy(s, y, 2); }
};

struct Eulerian {
  Separable v[3] = {{0.3, {1, 1, 0}, 0.2, {0.5, -1.0, 0.7}},
                    {-0.4, {0, 1, -1}, 1.1, {-0.3, 0.4, 1.2}},
                    {0.25, {1, 0, 1}, -0.4, {0.8, 0.6, -0.9}}};
  Separable pi{0.6, {1, -1, 1}, 0.3, {0.2, -0.5, 0.4}};
  double eps = 0.08;

  double eta(double t, double x1, double x2) const { return eps * (std::cos(x1) + 0.5 * std::sin(t + x2)); }
  double eta_d(double t, double x1, double x2, int a) const {
    if (a == 0) return eps * 0.5 * std::cos(t + x2);
    if (a == 1) return -eps * std::sin(x1);
    return eps * 0.5 * std::cos(t + x2);
  }
  double y3(double t, double x1, double x2, double x3) const { return x3 - (1.0 - x3) * eta(t, x1, x2); }
};

struct Pulled {
  SpectralField u, p;
  PlateField eta;
};

Pulled pull_back(const Eulerian& e, const TorusGrid& g) {
  const Samples us = sample_function(g, 3, [&](double t, double x1, double x2, double x3, cplx* out) {
    const double s[3] = {t, x1, x2};
    for (int i = 0; i < 3; ++i) out[i] = e.v[i].value(s, e.y3(t, x1, x2, x3));
  });
  const Samples ps = sample_function(g, 1, [&](double t, double x1, double x2, double x3, cplx* out) {
    const double s[3] = {t, x1, x2};
    out[0] = e.pi.value(s, e.y3(t, x1, x2, x3));
  });
  const Samples hs = sample_plate_function(g, [&](double t, double x1, double x2) { return cplx(e.eta(t, x1, x2)); });
  return {forward_transform(us, g, true), forward_transform(ps, g, true), forward_transform_plate(hs, g, true)};
}

double coeff_diff(const SpectralField& a, const SpectralField& b) { return (a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff(); }
double coeff_diff(const PlateField& a, const PlateField& b) { return (a.coeffs() - b.coeffs()).cwiseAbs().maxCoeff(); }

SpectralField laplacian(const SpectralField& f) { return f.dx(1).dx(1) + f.dx(2).dx(2) + f.dx3(2); }

}  // namespace

TEST_CASE("dealias sizes") {
  CHECK(dealias_size(5) == 9);
  CHECK(dealias_size(17) == 27);
  CHECK(dealias_size(7) == 11);
  CHECK(dealias_size(1) == 3);
}

TEST_CASE("deformation map and inverse") {
  const TorusGrid g(5, 5, 8);
  PlateField eta(g, true);
  eta(0, 1, 0) = 0.1;
  eta(0, -1, 0) = 0.1;
  eta(1, 0, 1) = cplx(0.0, -0.05);
  eta(-1, 0, -1) = cplx(0.0, 0.05);
  const Deformation phi(eta);
  // 0.2 cos x1 + 0.1 sin(t + x2) peaks at 0.3, sampled on the padded lattice
  CHECK(phi.sup_eta() <= 0.3 + 1e-15);
  CHECK(phi.sup_eta() > 0.29);
  for (double x3 : {0.0, 0.3, 1.0}) {
    const Eigen::Vector3d x(0.7, 1.9, x3);
    const Eigen::Vector3d y = phi.map(0.4, x);
    CHECK((phi.inverse(0.4, y) - x).norm() < 1e-14);
    CHECK(y(2) == doctest::Approx(x3 - (1.0 - x3) * evaluate_plate(eta, 0.4, 0.7, 1.9).real()));
  }
  // top wall is fixed, bottom follows -eta
  CHECK(phi.map(1.0, {0.0, 0.0, 1.0})(2) == doctest::Approx(1.0));
  CHECK(phi.map(0.0, {0.0, 0.0, 0.0})(2) == doctest::Approx(-0.2));

  PlateField big(g, true);
  big(0, 0, 0) = 1.2;
  CHECK_THROWS_AS(Deformation{big}, Error);
}

TEST_CASE("E matrix for constant eta") {
  const TorusGrid g(3, 3, 6);
  PlateField eta(g, true);
  eta(0, 0, 0) = -0.1;
  const auto E = e_matrix(eta);
  for (int i = 0; i < 6; ++i) CHECK(E[i].max_abs() == 0.0);
  CHECK(E[6].max_abs() < 1e-15);
  CHECK(E[7].max_abs() < 1e-15);
  const Eigen::VectorXcd e33 = E[8].profile({0, 0, 0}, 0);
  for (Eigen::Index j = 0; j < e33.size(); ++j) CHECK(std::abs(e33(j) - 0.1 / 0.9) < 1e-15);
}

TEST_CASE("unit normal") {
  const TorusGrid g(3, 9, 4);
  const double eps = 1e-4;
  PlateField eta(g, true);
  eta(0, 1, 0) = cplx(0.0, -0.5 * eps);  // eps sin x1
  eta(0, -1, 0) = cplx(0.0, 0.5 * eps);
  const Samples nu = normal_vector(eta, false);
  for (int i1 = 0; i1 < nu.nx; ++i1) {
    const double x1 = g.period_x() * i1 / nu.nx;
    double norm2 = 0.0;
    for (int c = 0; c < 3; ++c) norm2 += std::norm(nu(0, i1, 0, 0, c));
    CHECK(std::abs(norm2 - 1.0) < 1e-14);
    CHECK(std::abs(nu(0, i1, 0, 0, 0).real() - eps * std::cos(x1)) < eps * eps);
    CHECK(std::abs(nu(0, i1, 0, 0, 1)) < 1e-15);
    CHECK(std::abs(nu(0, i1, 0, 0, 2).real() + 1.0) < eps * eps);
  }
}

TEST_CASE("nonlinear terms vanish with eta = 0 except convection") {
  const TorusGrid g(5, 5, 8);
  const SpectralField u = 0.1 * test::random_field(g, 3, true, 3);
  const SpectralField p = 0.1 * test::random_field(g, 1, true, 4);
  const NonlinearTerms t = compute_nonlinear_terms(u, p, PlateField(g, true));
  CHECK(coeff_diff(t.Rf_tilde, -1.0 * t.convective) < 1e-15);
  CHECK(t.Rd_vector.max_abs() == 0.0);
  CHECK(t.Rd_tilde.max_abs() == 0.0);
  CHECK(t.R_eta.max_abs() < 1e-15);
  for (const auto& s : t.S_eta) CHECK(s.max_abs() == 0.0);
}

TEST_CASE("convection matches pointwise product") {
  const TorusGrid g(3, 5, 4);
  SpectralField u(g, 3, true);
  // u = (0, 0, x3 cos x1): u3 d3 u3 = x3 cos^2 x1
  Eigen::VectorXcd prof = g.x3().cast<cplx>() * 0.5;
  u.set_profile({0, 1, 0}, 2, prof);
  u.set_profile({0, -1, 0}, 2, prof);
  const NonlinearTerms t = compute_nonlinear_terms(u, SpectralField(g, 1, true), PlateField(g, true));
  // x3 cos^2 x1 = x3 / 2 + x3 cos(2 x1) / 2
  const Eigen::VectorXcd mean = t.convective.profile({0, 0, 0}, 2);
  const Eigen::VectorXcd second = t.convective.profile({0, 2, 0}, 2);
  for (Eigen::Index j = 0; j < mean.size(); ++j) {
    CHECK(std::abs(mean(j) - 0.5 * g.x3()(j)) < 1e-14);
    CHECK(std::abs(second(j) - 0.25 * g.x3()(j)) < 1e-14);
  }
}

TEST_CASE("pullback identities against Eulerian operators") {
  const TorusGrid g(7, 7, 6);
  const Eulerian e;
  const Pulled f = pull_back(e, g);
  const double mu = 0.7;
  const int mt = dealias_size(g.nt()), mx = dealias_size(g.nx());
  const NonlinearTerms t = compute_nonlinear_terms(f.u, f.p, f.eta, mu);
  const int n = g.nodes();

  Samples eul(mt, mx, n, 3), jdiv(mt, mx, n, 1), plate(mt, mx, 1, 1);
  for (int it = 0; it < mt; ++it)
    for (int i1 = 0; i1 < mx; ++i1)
      for (int i2 = 0; i2 < mx; ++i2) {
        const double s[3] = {g.period_t() * it / mt, g.period_x() * i1 / mx, g.period_x() * i2 / mx};
        const double h = e.eta(s[0], s[1], s[2]);
        for (int j = 0; j < n; ++j) {
          const double y = e.y3(s[0], s[1], s[2], g.x3()(j));
          double div = 0.0;
          for (int i = 0; i < 3; ++i) {
            double conv = 0.0;
            for (int k = 0; k < 3; ++k) conv += e.v[k].value(s, y) * e.v[i].grad(s, y, k);
            eul(it, i1, i2, j, i) = e.v[i].d(s, y, 0, 0) + conv - mu * e.v[i].laplace(s, y) + e.pi.grad(s, y, i);
            div += e.v[i].grad(s, y, i);
          }
          jdiv(it, i1, i2, j) = (1.0 + h) * div;
        }
        // Eulerian stress on the deformed plate, contracted with the unit normal
        const double y = -h;
        const double h1 = e.eta_d(s[0], s[1], s[2], 1), h2 = e.eta_d(s[0], s[1], s[2], 2);
        const double sq = std::sqrt(1.0 + h1 * h1 + h2 * h2);
        const double nu[3] = {h1 / sq, h2 / sq, -1.0 / sq};
        double tn = 0.0;
        for (int k = 0; k < 3; ++k) {
          const double T3k = mu * (e.v[2].grad(s, y, k) + e.v[k].grad(s, y, 2)) - (k == 2 ? e.pi.value(s, y) : 0.0);
          tn += T3k * nu[k];
        }
        plate(it, i1, i2) = tn;
      }

  SpectralField grad_p(g, 3, true);
  for (int k = 0; k < 3; ++k) grad_p.set_component(k, f.p.dx(k + 1));
  const SpectralField reference = f.u.dt() - mu * laplacian(f.u) + grad_p;
  const SpectralField expected_rf = reference - forward_transform_padded(eul, g, true);
  const double scale = reference.max_abs();
  CHECK(coeff_diff(t.Rf_tilde, expected_rf) < 1e-12 * scale);
  CHECK(t.Rf_tilde.max_abs() > 1e-3 * scale);

  const SpectralField expected_rd = divergence(f.u) - forward_transform_padded(jdiv, g, true);
  CHECK(coeff_diff(t.Rd_tilde, expected_rd) < 1e-12 * divergence(f.u).max_abs());

  const PlateField T33 = mu * (2.0 * trace_bottom(f.u.dx(3), 2)) - trace_bottom(f.p);
  const PlateField expected_eta = forward_transform_plate_padded(plate, g, true) + T33;
  CHECK(coeff_diff(t.R_eta, expected_eta) < 1e-12 * T33.max_abs());
  CHECK(t.R_eta.max_abs() > 1e-3 * T33.max_abs());
}

TEST_CASE("nonlinear terms are quadratic at small amplitude") {
  const TorusGrid g(5, 5, 8);
  const SpectralField u = test::random_field(g, 3, true, 11);
  const SpectralField p = test::random_field(g, 1, true, 12);
  const PlateField eta = test::random_plate(g, true, 13);
  auto size = [&](double a) {
    const NonlinearTerms t = compute_nonlinear_terms(a * u, a * p, a * eta);
    return std::array<double, 3>{t.Rf_tilde.max_abs(), t.Rd_tilde.max_abs(), t.R_eta.max_abs()};
  };
  const auto s1 = size(1e-6), s2 = size(2e-6);
  for (int i = 0; i < 3; ++i) CHECK(s2[i] / s1[i] == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("bound ratios are finite and zero on zero fields") {
  const TorusGrid g(5, 5, 8);
  const BoundRatios z = nonlinear_bound_ratios(SpectralField(g, 3, true), SpectralField(g, 1, true), PlateField(g, true));
  CHECK(z.Rf == 0.0);
  CHECK(z.Rd == 0.0);
  CHECK(z.Reta == 0.0);
  CHECK(z.E == 0.0);
  const double a = 1e-2;
  const BoundRatios r = nonlinear_bound_ratios(a * test::random_field(g, 3, true, 1), a * test::random_field(g, 1, true, 2),
                                               a * test::random_plate(g, true, 3));
  for (double v : {r.Rf, r.Rd, r.Reta, r.E}) {
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }
}

TEST_CASE("smallness gate") {
  const TorusGrid g(5, 5, 8);
  CHECK(smallness_check(PlateField(g, true), 0.1).pass);
  PlateField tiny(g, true);
  tiny(1, 1, 0) = 1e-4;
  tiny(-1, -1, 0) = 1e-4;
  const SmallnessReport ok = smallness_check(tiny, 0.1);
  CHECK(ok.pass);
  CHECK(ok.sup_eta == doctest::Approx(2e-4).epsilon(1e-6));
  CHECK(ok.margin > 0.0);

  PlateField big(g, true);
  big(0, 0, 0) = 0.6;
  const SmallnessReport bad = smallness_check(big, 10.0);
  CHECK_FALSE(bad.pass);
  CHECK(bad.failed == "sup |eta| <= 1/2");
  CHECK(bad.sup_eta == doctest::Approx(0.6));

  const SmallnessReport s_fail = smallness_check(big, 1e-3);
  CHECK_FALSE(s_fail.pass);
  CHECK(s_fail.margin < 0.0);
}

TEST_CASE("forcing pullback") {
  const TorusGrid g(3, 5, 6);
  Forcing f = Forcing::from_function(g, [](double, double x1, double, double y3, double* out) {
    out[0] = y3 * std::cos(x1);
    out[1] = 0.0;
    out[2] = 1.0;
  });
  PlateField eta(g, true);
  eta(0, 0, 0) = 0.2;
  const SpectralField pulled = f.pullback(eta);
  // y3 = x3 - 0.2 (1 - x3) = 1.2 x3 - 0.2
  const Eigen::VectorXcd prof = pulled.profile({0, 1, 0}, 0);
  for (Eigen::Index j = 0; j < prof.size(); ++j) CHECK(std::abs(prof(j) - 0.5 * (1.2 * g.x3()(j) - 0.2)) < 1e-14);
  CHECK(std::abs(pulled.profile({0, 0, 0}, 2)(3) - 1.0) < 1e-14);

  const SpectralField fixed = test::random_field(g, 3, true, 5);
  CHECK(coeff_diff(Forcing::from_field(fixed).pullback(eta), fixed) == 0.0);
  CHECK(Forcing::zero(g).pullback(eta).max_abs() == 0.0);
}

TEST_CASE("Picard iteration") {
  SolverConfig cfg;
  cfg.nt = 3;
  cfg.nx = 3;
  cfg.nz = 12;
  const TorusGrid g = cfg.grid();
  const ModeSolver solver(cfg);

  SUBCASE("zero data") {
    const PicardResult r = picard_solve(solver, Forcing::zero(g), PlateField(g, true), cfg);
    CHECK(r.converged);
    CHECK(r.trace.size() == 1);
    CHECK(r.fields.u.max_abs() == 0.0);
    CHECK(r.fields.eta.max_abs() == 0.0);
  }

  auto forcing = [&](double a) {
    return Forcing::from_function(g, [a](double t, double x1, double x2, double y3, double* out) {
      out[0] = a * std::sin(x2) * (1.0 + y3);
      out[1] = a * std::cos(t + x1);
      out[2] = a * std::cos(x1 + x2) * y3;
    });
  };
  auto plate_load = [&](double a) {
    PlateField h(g, true);
    h(1, 1, 0) = 0.5 * a;
    h(-1, -1, 0) = 0.5 * a;
    return h;
  };

  SUBCASE("small data converges") {
    const PicardResult r = picard_solve(solver, forcing(5e-4), plate_load(5e-4), cfg);
    CHECK(r.epsilon == doctest::Approx(1e-3).epsilon(0.5));
    CHECK(r.converged);
    CHECK(r.trace.size() <= 10);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].ratio < 0.5);
    CHECK(r.residual.max() < 1e-9);
    CHECK(r.trace.back().x_norm <= r.radius);
    const nlohmann::json j = r.trace_json();
    CHECK(j["steps"].size() == r.trace.size());
  }

  SUBCASE("solution scales linearly in the data") {
    const double a = 1e-4;
    const double x1 = picard_solve(solver, forcing(a), plate_load(a), cfg).trace.back().x_norm;
    const double x2 = picard_solve(solver, forcing(2 * a), plate_load(2 * a), cfg).trace.back().x_norm;
    CHECK(std::log2(x2 / x1) == doctest::Approx(1.0).epsilon(1e-2));
  }

  SUBCASE("large data diverges") {
    CHECK_THROWS_AS(picard_solve(solver, forcing(50.0), plate_load(50.0), cfg), Error);
  }
}
