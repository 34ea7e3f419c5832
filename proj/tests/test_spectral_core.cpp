#include <cmath>

#include "doctest.h"
#include "plateflow/errors.hpp"
#include "plateflow/field_io.hpp"
#include "plateflow/norms.hpp"
#include "test_support.hpp"

using namespace plateflow;
using plateflow::test::random_field;
using plateflow::test::random_plate;

TEST_CASE("grid invariants") {
  const TorusGrid g(5, 3, 8);
  CHECK(g.x3()(0) == 0.0);
  CHECK(g.x3()(8) == doctest::Approx(1.0).epsilon(1e-15));
  for (int j = 0; j < 8; ++j) CHECK(g.x3()(j) < g.x3()(j + 1));
  CHECK_THROWS_AS(TorusGrid(4, 3, 8), Error);
  CHECK_THROWS_AS(TorusGrid(3, 1, 8), Error);
  CHECK_THROWS_AS(TorusGrid(3, 3, 3), Error);
  for (std::size_t o = 0; o < g.mode_count(); ++o) {
    const ModeIndex m = g.mode_at(o);
    CHECK(g.mode_offset(m.k, m.m1, m.m2) == o);
  }
}

TEST_CASE("forward transform of constant and cos t") {
  const TorusGrid g(5, 5, 6);
  const Samples one = sample_function(g, 1, [](double, double, double, double, cplx* o) { o[0] = 1.0; });
  const SpectralField c = forward_transform(one, g, true);
  for (std::size_t o = 0; o < g.mode_count(); ++o) {
    const ModeIndex m = g.mode_at(o);
    const double expect = (m.k == 0 && m.lateral_zero()) ? 1.0 : 0.0;
    CHECK((c.profile(m).array() - expect).abs().maxCoeff() < 1e-14);
  }
  const Samples cs = sample_function(g, 1, [](double t, double, double, double, cplx* o) { o[0] = std::cos(t); });
  const SpectralField f = forward_transform(cs, g, true);
  for (std::size_t o = 0; o < g.mode_count(); ++o) {
    const ModeIndex m = g.mode_at(o);
    const double expect = (std::abs(m.k) == 1 && m.lateral_zero()) ? 0.5 : 0.0;
    CHECK((f.profile(m).array() - expect).abs().maxCoeff() < 1e-14);
  }
  CHECK_THROWS_AS(forward_transform(cs, TorusGrid(5, 3, 6)), Error);
}

TEST_CASE("inverse transform of single mode and zero") {
  const TorusGrid g(3, 5, 4);
  SpectralField f(g, 1);
  f.set_profile({1, 1, 0}, 0, Eigen::VectorXcd::Ones(g.nodes()));
  const Samples s = inverse_transform(f);
  double err = 0.0;
  for (int it = 0; it < g.nt(); ++it)
    for (int i1 = 0; i1 < g.nx(); ++i1)
      for (int i2 = 0; i2 < g.nx(); ++i2)
        for (int j = 0; j < g.nodes(); ++j)
          err = std::max(err, std::abs(s(it, i1, i2, j) - std::exp(I * (g.t_sample(it) + g.x_sample(i1)))));
  CHECK(err < 1e-14);
  CHECK(inverse_transform(SpectralField(g, 3)).max_abs() == 0.0);
}

TEST_CASE("round trip and realness on random band-limited fields") {
  const TorusGrid g(7, 5, 8);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SpectralField f = random_field(g, 3, true, seed);
    CHECK(f.conjugate_symmetry_error() < 1e-14);
    const Samples s = inverse_transform(f);
    CHECK(s.max_imag() < 1e-13);
    const SpectralField back = forward_transform(s, g, true);
    CHECK((back.coeffs() - f.coeffs()).cwiseAbs().maxCoeff() < 1e-12);
    const PlateField h = random_plate(g, true, seed);
    const PlateField hb = forward_transform_plate(inverse_transform_plate(h), g, true);
    CHECK((hb.coeffs() - h.coeffs()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("padded synthesis matches the plain one on shared points") {
  const TorusGrid g(5, 5, 6);
  const SpectralField f = random_field(g, 1, false, 11);
  const Samples a = inverse_transform(f);
  const Samples b = inverse_transform_padded(f, 15, 15);
  double err = 0.0;
  for (int it = 0; it < 5; ++it)
    for (int i1 = 0; i1 < 5; ++i1)
      for (int i2 = 0; i2 < 5; ++i2)
        for (int j = 0; j < g.nodes(); ++j) err = std::max(err, std::abs(a(it, i1, i2, j) - b(3 * it, 3 * i1, 3 * i2, j)));
  CHECK(err < 1e-12);
  const SpectralField back = forward_transform_padded(b, g);
  CHECK((back.coeffs() - f.coeffs()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("projections") {
  const TorusGrid g(5, 3, 6);
  const Samples cs = sample_function(g, 1, [](double t, double, double, double, cplx* o) { o[0] = std::cos(t); });
  const SpectralField c = forward_transform(cs, g, true);
  CHECK(project_steady(c).max_abs() < 1e-15);
  CHECK((project_oscillatory(c) - c).max_abs() < 1e-15);
  const SpectralField f = random_field(g, 3, true, 3);
  CHECK(project_steady(project_oscillatory(f)).max_abs() == 0.0);
  CHECK((project_steady(project_steady(f)) - project_steady(f)).max_abs() == 0.0);
  CHECK((project_steady(f) + project_oscillatory(f) - f).max_abs() < 1e-15);
}

TEST_CASE("chebyshev derivative and quadrature") {
  const ChebyshevBasis b(12);
  const Eigen::VectorXcd one = Eigen::VectorXcd::Ones(b.size());
  CHECK(cheb_derivative(b, one, 1).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::VectorXcd x = b.nodes.cast<cplx>();
  CHECK((cheb_derivative(b, x, 1).array() - 1.0).abs().maxCoeff() < 1e-12);
  const Eigen::VectorXcd x2 = x.array().square();
  CHECK((cheb_derivative(b, x2, 1) - 2.0 * x).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((cheb_derivative(b, x2, 2).array() - 2.0).abs().maxCoeff() < 1e-11);
  // int_0^1 x^5 = 1/6; int x^6 x^6 = 1/13 exactly through the upsampled inner product
  CHECK(std::abs(cheb_integral(b, Eigen::VectorXcd(x.array().pow(5))) - 1.0 / 6.0) < 1e-14);
  const Eigen::VectorXcd x6 = x.array().pow(6);
  CHECK(std::abs(cheb_inner(b, x6, x6) - 1.0 / 13.0) < 1e-14);
  // antiderivative vanishes at 0
  const Eigen::VectorXd anti = b.antiderivative * b.nodes;
  CHECK((anti - 0.5 * b.nodes.array().square().matrix()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("traces") {
  const TorusGrid g(3, 3, 6);
  SpectralField f(g, 1);
  f.set_profile({1, 0, 1}, 0, Eigen::VectorXcd::Constant(g.nodes(), 2.5));
  f.set_profile({0, 1, 0}, 0, g.x3().cast<cplx>());
  const PlateField b = trace_bottom(f);
  CHECK(b(1, 0, 1) == 2.5);
  CHECK(b(0, 1, 0) == 0.0);
  const SpectralField r = random_field(g, 1, false, 5);
  const Samples s = inverse_transform(r);
  const Samples sb = inverse_transform_plate(trace_bottom(r));
  double err = 0.0;
  for (int it = 0; it < 3; ++it)
    for (int i1 = 0; i1 < 3; ++i1)
      for (int i2 = 0; i2 < 3; ++i2) err = std::max(err, std::abs(s(it, i1, i2, 0) - sb(it, i1, i2)));
  CHECK(err < 1e-12);
}

TEST_CASE("L2 norms: unit mode and Parseval against grid quadrature") {
  const TorusGrid g(5, 5, 10);
  SpectralField e(g, 1);
  e.set_profile({1, 1, 0}, 0, Eigen::VectorXcd::Ones(g.nodes()));
  CHECK(lq_norm(e, 2.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(sobolev_norm(SpectralField(g, 3), {1.0, 2.0, 2.0, NormDomain::slab}) == 0.0);
  CHECK(sobolev_norm(SpectralField(g, 1), {0.0, -1.0, 3.0, NormDomain::slab}) == 0.0);
  CHECK_THROWS_AS(sobolev_norm(e, {0.0, -1.5, 2.0, NormDomain::slab}), Error);

  const SpectralField f = random_field(g, 3, true, 21);
  const Samples s = inverse_transform(f);
  const ChebyshevBasis& b = g.cheb();
  // grid quadrature: lattice mean in (t, x'), exact x3 rule on the upsampled nodes
  double acc = 0.0;
  for (int it = 0; it < g.nt(); ++it)
    for (int i1 = 0; i1 < g.nx(); ++i1)
      for (int i2 = 0; i2 < g.nx(); ++i2)
        for (int c = 0; c < 3; ++c) {
          Eigen::VectorXcd prof(g.nodes());
          for (int j = 0; j < g.nodes(); ++j) prof(j) = s(it, i1, i2, j, c);
          const Eigen::VectorXcd fine = b.upsample.cast<cplx>() * prof;
          for (Eigen::Index j = 0; j < fine.size(); ++j) acc += b.fine_weights(j) * std::norm(fine(j));
        }
  acc /= static_cast<double>(g.nt()) * g.nx() * g.nx();
  CHECK(std::abs(lq_norm(f, 2.0) - std::sqrt(acc)) < 1e-12 * std::sqrt(acc));
}

TEST_CASE("q != 2 norms use physical quadrature") {
  const TorusGrid g(3, 3, 16);
  SpectralField c(g, 1, true);
  c.set_profile({0, 0, 0}, 0, Eigen::VectorXcd::Constant(g.nodes(), 2.0));
  CHECK(lq_norm(c, 3.0) == doctest::Approx(2.0).epsilon(1e-13));
  // |cos t| in L^4: (3/8)^{1/4}, sampled exactly on a lattice with nt >= 5
  const TorusGrid g5(5, 3, 4);
  const SpectralField ct =
      forward_transform(sample_function(g5, 1, [](double t, double, double, double, cplx* o) { o[0] = std::cos(t); }), g5);
  CHECK(lq_norm(ct, 4.0) == doctest::Approx(std::pow(3.0 / 8.0, 0.25)).epsilon(1e-12));
}

TEST_CASE("negative norm") {
  const TorusGrid g(3, 3, 16);
  CHECK(negative_norm(SpectralField(g, 1), 2.0) == 0.0);
  // g = cos x1: potential (1 - d^2) phi = g gives phi = cos x1, |grad phi|_2 = 1/sqrt 2
  const SpectralField c =
      forward_transform(sample_function(g, 1, [](double, double x1, double, double, cplx* o) { o[0] = std::cos(x1); }), g);
  CHECK(negative_norm(c, 2.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  // mean-free x3 profile x3 - 1/2: phi' = (x3 - x3^2)/2, |phi'|_2^2 = 1/120
  const SpectralField z = forward_transform(
      sample_function(g, 1, [](double, double, double, double x3, cplx* o) { o[0] = x3 - 0.5; }), g);
  CHECK(negative_norm(z, 2.0) == doctest::Approx(1.0 / std::sqrt(120.0)).epsilon(1e-12));
  // constants pair to zero against gradients
  const SpectralField k = forward_transform(
      sample_function(g, 1, [](double, double, double, double, cplx* o) { o[0] = 3.0; }), g);
  CHECK(negative_norm(k, 2.0) < 1e-13);
}

TEST_CASE("fractional plate norms use Bessel weights") {
  const TorusGrid g(3, 5, 4);
  PlateField h(g);
  h(0, 2, 0) = 1.0;
  // (1 + |xi|^2)^{s/2} with |xi|^2 = 4
  CHECK(sobolev_norm(h, {0.0, 0.5, 2.0, NormDomain::plate}) == doctest::Approx(std::pow(5.0, 0.25)).epsilon(1e-14));
  PlateField e(g);
  e(1, 1, 0) = 1.0;
  CHECK(sobolev_norm(e, {2.0, 0.0, 2.0, NormDomain::plate}) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("coefficient container round trip") {
  const TorusGrid g(3, 3, 5);
  const SpectralField f = random_field(g, 3, true, 8);
  const std::string path = "unit_tests_field.plf";
  write_field(path, f);
  const ContainerHeader h = read_header(path);
  CHECK(h.nt == 3);
  CHECK(h.components == 3);
  const SpectralField r = read_field(path, g);
  CHECK((r.coeffs() - f.coeffs()).cwiseAbs().maxCoeff() == 0.0);
  const PlateField p = random_plate(g, true, 4);
  write_plate(path, p);
  CHECK((read_plate(path, g).coeffs() - p.coeffs()).cwiseAbs().maxCoeff() == 0.0);
  const SpectralField j = field_from_json(to_json(f), g);
  CHECK((j.coeffs() - f.coeffs()).cwiseAbs().maxCoeff() == 0.0);
  std::remove(path.c_str());
}
