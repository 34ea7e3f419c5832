#include <cmath>

#include "doctest.h"
#include "plateflow/errors.hpp"
#include "plateflow/expression.hpp"
#include "plateflow/scenario.hpp"

using namespace plateflow;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::io;
}

std::string message_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("expression evaluation") {
  CHECK(Expression::parse("1 + 2 * 3")(0, 0, 0, 0) == 7.0);
  CHECK(Expression::parse("-2^2")(0, 0, 0, 0) == -4.0);
  CHECK(Expression::parse("2^3^2")(0, 0, 0, 0) == 512.0);
  CHECK(Expression::parse("(1 - 2) - 3")(0, 0, 0, 0) == -4.0);
  CHECK(Expression::parse("8 / 4 / 2")(0, 0, 0, 0) == 1.0);
  CHECK(Expression::parse("1e-3 * x3")(0, 0, 0, 0.5) == doctest::Approx(5e-4));
  CHECK(Expression::parse("sin(pi/2) + cos(0) + exp(0)")(0, 0, 0, 0) == doctest::Approx(3.0));
  CHECK(Expression::parse("t*x1 - x2")(2, 3, 4, 0) == 2.0);
  CHECK(evaluate_constant("2*pi") == doctest::Approx(two_pi));
  CHECK(Expression::parse("0").is_zero());
  CHECK(Expression::parse("x3 * cos(x1)").uses_x3());
  CHECK_FALSE(Expression::parse("cos(x1)").uses_x3());
}

TEST_CASE("expression parse errors carry the column") {
  CHECK(kind_of([] { Expression::parse("1 + "); }) == ErrorKind::parse);
  CHECK(message_of([] { Expression::parse("1 + "); }).find("column 5") != std::string::npos);
  CHECK(message_of([] { Expression::parse("sin(t"); }).find("expected ')'") != std::string::npos);
  CHECK(message_of([] { Expression::parse("2 * tan(t)"); }).find("column 5: unknown name 'tan'") != std::string::npos);
  CHECK(message_of([] { Expression::parse("1 $ 2"); }).find("column 3") != std::string::npos);
  CHECK(kind_of([] { Expression::parse(""); }) == ErrorKind::parse);
  CHECK(kind_of([] { evaluate_constant("t + 1"); }) == ErrorKind::parse);
}

TEST_CASE("periodicity check") {
  CHECK_NOTHROW(Expression::parse("cos(3*t) * sin(x1 - 2*x2) + exp(sin(t))").check_periodic(two_pi, two_pi));
  CHECK_NOTHROW(Expression::parse("x3^2").check_periodic(two_pi, two_pi));
  CHECK_NOTHROW(Expression::parse("cos(2*pi*t)").check_periodic(1.0, two_pi));
  CHECK(kind_of([] { Expression::parse("cos(0.5*t)").check_periodic(two_pi, two_pi); }) == ErrorKind::periodicity);
  const std::string msg = message_of([] { Expression::parse("1 + x3 * cos(0.5*t)").check_periodic(two_pi, two_pi); });
  CHECK(msg.find("\"cos(0.5*t)\" at column 10") != std::string::npos);
  CHECK(kind_of([] { Expression::parse("x1").check_periodic(two_pi, two_pi); }) == ErrorKind::periodicity);
}

TEST_CASE("sampled expressions") {
  const TorusGrid g(5, 5, 6);
  CHECK(sample_expression(g, Expression::parse("0")).max_abs() == 0.0);

  const SpectralField f = sample_expression(g, Expression::parse("0.001*cos(t)*sin(x1)"));
  // cos t sin x1 = sum over signs of (s1 s2 / 4i) e^{i(s1 t + s2 x1)} with s1 factor 1
  const cplx c = 0.001 / (4.0 * I);
  for (int k : {-1, 1})
    for (int m : {-1, 1}) {
      const Eigen::VectorXcd p = f.profile({k, m, 0}, 0);
      CHECK((p.array() - double(m) * c).abs().maxCoeff() < 1e-17);
    }
  double rest = 0.0;
  for (std::size_t o = 0; o < g.mode_count(); ++o) {
    const ModeIndex m = g.mode_at(o);
    if (std::abs(m.k) == 1 && std::abs(m.m1) == 1 && m.m2 == 0) continue;
    rest = std::max(rest, f.profile(m, 0).cwiseAbs().maxCoeff());
  }
  CHECK(rest < 1e-18);

  const PlateField h = sample_plate_expression(g, Expression::parse("cos(x2)"));
  CHECK(std::abs(h(0, 0, 1) - 0.5) < 1e-15);
  CHECK(kind_of([&] { sample_plate_expression(g, Expression::parse("x3")); }) == ErrorKind::parse);
  CHECK(kind_of([&] { sample_expression(g, Expression::parse("cos(0.5*t)")); }) == ErrorKind::periodicity);
}

TEST_CASE("config parsing") {
  const ScenarioConfig c = parse_config(R"(# demo
period_t = 2*pi
nt = 3   # odd
nx = 5
nz = 12
mu_s = 0.5
f1 = 0.001*cos(t)*sin(x1)
h = cos(x1)
dealias = false
amplitude = 2
seed = 7
out = results
)");
  CHECK(c.solver.nt == 3);
  CHECK(c.solver.nx == 5);
  CHECK(c.solver.nz == 12);
  CHECK(c.solver.mu_s == 0.5);
  CHECK_FALSE(c.solver.dealias);
  CHECK(c.f[0] == "0.001*cos(t)*sin(x1)");
  CHECK(c.f[1] == "0");
  CHECK(c.h == "cos(x1)");
  CHECK(c.amplitude == 2.0);
  CHECK(c.seed == 7);
  CHECK(c.out == "results");

  const TorusGrid g = c.solver.grid();
  const SpectralField f = load_forcing(c, g);
  CHECK(std::abs(f(1, 1, 0, 2, 0) - 2.0 * 0.001 / (4.0 * I)) < 1e-17);
  CHECK(std::abs(load_plate_load(c, g)(0, 1, 0) - 1.0) < 1e-15);
  CHECK(load_divergence(c, g).max_abs() == 0.0);

  CHECK(parse_config("nz = 12\n").hash() == parse_config("# same\nnz=12").hash());
  CHECK(parse_config("nz = 12\n").hash() != parse_config("nz = 14").hash());
  CHECK(c.to_json()["tolerances"].contains("tol_eq"));
}

TEST_CASE("config errors") {
  CHECK(message_of([] { parse_config("nt = 3\nbogus = 1\n", "a.cfg"); }).find("a.cfg:2: unknown key") != std::string::npos);
  CHECK(kind_of([] { parse_config("nt = 4"); }) == ErrorKind::config);
  CHECK(kind_of([] { parse_config("nz = 2"); }) == ErrorKind::config);
  CHECK(kind_of([] { parse_config("nt 3"); }) == ErrorKind::config);
  CHECK(kind_of([] { parse_config("nt = 3.5"); }) == ErrorKind::config);
  CHECK(kind_of([] { parse_config("mu_s = -1"); }) == ErrorKind::config);
  CHECK(kind_of([] { parse_config("f1 = sin("); }) == ErrorKind::config);
  CHECK(kind_of([] { parse_config("nt = 3\nnt = 5"); }) == ErrorKind::config);
  CHECK(kind_of([] { parse_config("dealias = maybe"); }) == ErrorKind::config);
  CHECK(kind_of([] { load_config("/nonexistent/file.cfg"); }) == ErrorKind::config);
  const ScenarioConfig undamped = parse_config("mu_s = 0");
  CHECK_NOTHROW(undamped.validate());
  CHECK(kind_of([&] { undamped.require_damped(); }) == ErrorKind::config);
}
