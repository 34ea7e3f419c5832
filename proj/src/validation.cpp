#include "plateflow/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "plateflow/errors.hpp"
#include "plateflow/divergence_lift.hpp"
#include "plateflow/norms.hpp"

namespace plateflow {

// ---------------------------------------------------------------- Profile

Profile Profile::monomial(cplx c, int power, cplx rate) {
  Profile p;
  p.terms_.push_back({c, power, rate});
  return p;
}

cplx Profile::operator()(double x) const {
  cplx v(0.0);
  for (const Term& t : terms_) v += t.c * std::pow(x, t.power) * std::exp(t.rate * x);
  return v;
}

Profile Profile::derivative(int order) const {
  Profile cur = *this;
  for (int o = 0; o < order; ++o) {
    Profile next;
    for (const Term& t : cur.terms_) {
      if (t.rate != cplx(0.0)) next.terms_.push_back({t.c * t.rate, t.power, t.rate});
      if (t.power > 0) next.terms_.push_back({t.c * static_cast<double>(t.power), t.power - 1, t.rate});
    }
    cur = std::move(next);
  }
  return cur;
}

Profile Profile::conj() const {
  Profile p;
  for (const Term& t : terms_) p.terms_.push_back({std::conj(t.c), t.power, std::conj(t.rate)});
  return p;
}

Eigen::VectorXcd Profile::sample(const Eigen::VectorXd& x) const {
  Eigen::VectorXcd v(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) v(j) = (*this)(x(j));
  return v;
}

Profile& Profile::operator+=(const Profile& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  return *this;
}

Profile& Profile::operator*=(cplx s) {
  for (Term& t : terms_) t.c *= s;
  return *this;
}

Profile operator-(Profile a, const Profile& b) { return a += (-1.0) * b; }

Profile operator*(const Profile& a, const Profile& b) {
  Profile p;
  for (const auto& s : a.terms_)
    for (const auto& t : b.terms_) p.terms_.push_back({s.c * t.c, s.power + t.power, s.rate + t.rate});
  return p;
}

// ---------------------------------------------------------------- manufactured solutions

namespace {

// x (1 - x)
Profile bubble() { return Profile::monomial(1.0, 1) - Profile::monomial(1.0, 2); }
// (1 - x)^2 (1 + 2x) = 1 - 3x^2 + 2x^3: value 1 and slope 0 at x = 0, value and slope 0 at x = 1
Profile blend() { return Profile::constant(1.0) - Profile::monomial(3.0, 2) + Profile::monomial(2.0, 3); }

struct Draw {
  std::mt19937_64 rng;
  std::uniform_real_distribution<double> u{-1.0, 1.0};
  cplx complex(bool real) { return real ? cplx(u(rng), 0.0) : cplx(u(rng), u(rng)); }
  double real() { return u(rng); }
};

Profile random_profile(Draw& d, int terms, double amplitude, double rate, bool real) {
  Profile p;
  for (int r = 0; r < terms; ++r) {
    const cplx c = amplitude * d.complex(real);
    const cplx a = rate * d.complex(real);
    p += Profile::monomial(c, 0, a);
  }
  return p;
}

void apply_operators(ManufacturedCase::Mode& m, double omega, double xi1, double xi2, double mu_f, double mu_s) {
  const double s2 = xi1 * xi1 + xi2 * xi2;
  const cplx c0 = I * omega + mu_f * s2;
  for (int c = 0; c < 3; ++c) m.f[c] = c0 * m.u[c] - mu_f * m.u[c].derivative(2);
  m.f[0] += (I * xi1) * m.p;
  m.f[1] += (I * xi2) * m.p;
  m.f[2] += m.p.derivative();
  const Profile du3 = m.u[2].derivative();
  m.g = (I * xi1) * m.u[0] + (I * xi2) * m.u[1] + du3;
  m.h = plate_symbol_damped(omega, s2, mu_s) * m.eta - m.p(0.0) + 2.0 * mu_f * du3(0.0);
}

ManufacturedCase::Mode conjugate_mode(const ManufacturedCase::Mode& m) {
  ManufacturedCase::Mode c;
  c.mode = m.mode.conjugate();
  for (int i = 0; i < 3; ++i) {
    c.u[i] = m.u[i].conj();
    c.f[i] = m.f[i].conj();
  }
  c.p = m.p.conj();
  c.g = m.g.conj();
  c.eta = std::conj(m.eta);
  c.h = std::conj(m.h);
  return c;
}

}  // namespace

ManufacturedCase make_manufactured(std::uint64_t seed, const ManufacturedOptions& o, double period_t, double period_x) {
  ManufacturedCase mc;
  mc.options = o;
  mc.period_t = period_t;
  mc.period_x = period_x;
  mc.seed = seed;
  Draw d{std::mt19937_64(seed)};
  for (int k = -o.k_max; k <= o.k_max; ++k)
    for (int m1 = -o.m_max; m1 <= o.m_max; ++m1)
      for (int m2 = -o.m_max; m2 <= o.m_max; ++m2) {
        const ModeIndex idx{k, m1, m2};
        if (idx < idx.conjugate()) continue;
        const bool self = idx == idx.conjugate();
        const double omega = two_pi * k / period_t;
        const double xi1 = two_pi * m1 / period_x, xi2 = two_pi * m2 / period_x;
        const double s2 = xi1 * xi1 + xi2 * xi2;
        ManufacturedCase::Mode m;
        m.mode = idx;
        m.eta = (!idx.lateral_zero() && o.with_plate) ? o.amplitude * d.complex(self) : cplx(0.0);
        m.p = random_profile(d, o.terms, o.amplitude, o.rate, self);
        const Profile b = bubble();
        if (!o.divergence_free) {
          for (int c = 0; c < 3; ++c) m.u[c] = b * random_profile(d, o.terms, o.amplitude, o.rate, self);
          m.u[2] += (-I * omega * m.eta) * blend();
        } else if (idx.lateral_zero()) {
          m.u[0] = b * random_profile(d, o.terms, o.amplitude, o.rate, self);
          m.u[1] = b * random_profile(d, o.terms, o.amplitude, o.rate, self);
          m.u[2] = Profile();
        } else {
          const Profile q = random_profile(d, o.terms, o.amplitude, o.rate, self);
          const Profile r = random_profile(d, o.terms, o.amplitude, o.rate, self);
          m.u[2] = (-I * omega * m.eta) * blend() + (b * b) * q;
          const Profile du3 = m.u[2].derivative();
          m.u[0] = (I * xi1 / s2) * du3 + (-xi2) * (b * r);
          m.u[1] = (I * xi2 / s2) * du3 + xi1 * (b * r);
        }
        apply_operators(m, omega, xi1, xi2, o.mu_f, o.mu_s);
        mc.modes.push_back(m);
        if (!self) mc.modes.push_back(conjugate_mode(m));
      }
  return mc;
}

ManufacturedCase::Fields ManufacturedCase::on_grid(const TorusGrid& grid) const {
  if (std::abs(grid.period_t() - period_t) > 1e-14 || std::abs(grid.period_x() - period_x) > 1e-14)
    throw Error(ErrorKind::shape, "manufactured case periods differ from the grid");
  Fields F{SpectralField(grid, 3, true), SpectralField(grid, 1, true), PlateField(grid, true),
           SpectralField(grid, 3, true), SpectralField(grid, 1, true), PlateField(grid, true)};
  const Eigen::VectorXd& x = grid.x3();
  for (const Mode& m : modes) {
    if (!grid.contains(m.mode)) throw Error(ErrorKind::shape, "manufactured mode outside the grid lattice");
    for (int c = 0; c < 3; ++c) {
      F.u.set_profile(m.mode, c, m.u[c].sample(x));
      F.f.set_profile(m.mode, c, m.f[c].sample(x));
    }
    F.p.set_profile(m.mode, 0, m.p.sample(x));
    F.g.set_profile(m.mode, 0, m.g.sample(x));
    F.eta(m.mode) = m.eta;
    F.h(m.mode) = m.h;
  }
  return F;
}

double ManufacturedCase::constraint_residual() const {
  double r = 0.0;
  for (const Mode& m : modes) {
    const double omega = two_pi * m.mode.k / period_t;
    for (int c = 0; c < 3; ++c) {
      const cplx bottom = m.u[c](0.0) + (c == 2 ? I * omega * m.eta : cplx(0.0));
      r = std::max({r, std::abs(bottom), std::abs(m.u[c](1.0))});
    }
    if (m.mode.lateral_zero()) r = std::max(r, std::abs(m.eta));
  }
  return r;
}

CrossValidationReport cross_validate_linear(const ManufacturedCase& c, const SolverConfig& cfg) {
  const TorusGrid grid = cfg.grid();
  const ManufacturedCase::Fields F = c.on_grid(grid);
  const ModeSolver solver(cfg);
  const LinearSolution lift = solve_linear_full(solver, F.f, F.g, F.h, cfg.q);
  const SolutionFields direct = solve_modes(solver, F.f, F.g, F.h);
  CrossValidationReport r;
  r.path_discrepancy = x_norm(lift.fields.u - direct.u, lift.fields.p - direct.p, lift.fields.eta - direct.eta, cfg.q);
  r.truth_norm = x_norm(F.u, F.p, F.eta, cfg.q);
  const double scale = r.truth_norm > 0.0 ? r.truth_norm : 1.0;
  r.lift_truth_error = x_norm(lift.fields.u - F.u, lift.fields.p - F.p, lift.fields.eta - F.eta, cfg.q) / scale;
  r.direct_truth_error = x_norm(direct.u - F.u, direct.p - F.p, direct.eta - F.eta, cfg.q) / scale;
  r.pressure_convention =
      "pressure constant of each time mode fixed by the xi'=0 plate row p(0) = 2 mu_f d3u3(0) - h; "
      "applied identically to both solution paths and to the manufactured data";
  return r;
}

// ---------------------------------------------------------------- finite differences

namespace {

Samples shifted_samples(const SpectralField& f, int direction, double delta) {
  const TorusGrid& g = f.grid();
  if (direction == 3) {
    const Eigen::VectorXd pts = g.x3().array() + delta;
    const Eigen::MatrixXcd interp = interpolation_matrix(g.nz(), pts).cast<cplx>();
    SpectralField s(g, f.components());
    for (std::size_t o = 0; o < g.mode_count(); ++o) {
      const ModeIndex m = g.mode_at(o);
      for (int c = 0; c < f.components(); ++c) s.set_profile(m, c, interp * f.profile(m, c));
    }
    return inverse_transform(s);
  }
  SpectralField s(f);
  const Eigen::Index block = static_cast<Eigen::Index>(g.nodes()) * f.components();
  for (std::size_t o = 0; o < g.mode_count(); ++o) {
    const ModeIndex m = g.mode_at(o);
    const double freq = direction == 0 ? g.omega(m.k) : g.wavenumber(direction == 1 ? m.m1 : m.m2);
    s.coeffs().segment(o * block, block) *= std::exp(I * freq * delta);
  }
  return inverse_transform(s);
}

}  // namespace

double fd_check(const SpectralField& f, int direction, int oversample) {
  const TorusGrid& g = f.grid();
  if (direction < 0 || direction > 3) throw Error(ErrorKind::shape, "direction must be 0..3");
  double spacing = 0.0;
  if (direction == 0) spacing = g.period_t() / g.nt();
  else if (direction == 3) spacing = 1.0 / g.nz();
  else spacing = g.period_x() / g.nx();
  const double h = spacing / oversample;
  static const double w[3] = {45.0, -9.0, 1.0};
  Eigen::VectorXcd fd = Eigen::VectorXcd::Zero(inverse_transform(f).values.size());
  for (int j = 1; j <= 3; ++j)
    fd += w[j - 1] * (shifted_samples(f, direction, j * h).values - shifted_samples(f, direction, -j * h).values);
  fd /= 60.0 * h;
  const SpectralField d = direction == 0 ? f.dt() : f.dx(direction);
  const Eigen::VectorXcd spec = inverse_transform(d).values;
  return fd.size() ? (fd - spec).cwiseAbs().maxCoeff() : 0.0;
}

// ---------------------------------------------------------------- embedding

void check_embedding_params(const EmbeddingParams& e, int n) {
  const int mxs = e.mx[0] + e.mx[1] + (n == 3 ? e.mx[2] : 0);
  auto fail = [](const std::string& what) { throw Error(ErrorKind::unsupported, "embedding constraint violated: " + what); };
  if (e.m < 1) fail("m >= 1");
  if (e.mt < 0 || e.mx[0] < 0 || e.mx[1] < 0 || e.mx[2] < 0) fail("nonnegative derivative orders");
  if (n == 2 && e.mx[2] != 0) fail("plate fields have no x3 derivative");
  if (!(e.q > 1.0)) fail("q > 1");
  if (mxs + 2 * e.mt > 2 * e.m) fail("M_x + 2 M_t <= 2 m");
  const double top = 2.0 * (e.m - e.mt) - mxs;
  const double beta = top - e.alpha;
  if (e.alpha < 0.0 || e.alpha > top) fail("alpha in [0, 2(m - M_t) - M_x]");
  if (beta < 0.0 || beta > top) fail("beta = 2(m - M_t) - M_x - alpha in [0, 2(m - M_t) - M_x]");
  if (e.p < e.q || e.r < e.q) fail("p, r >= q");
  const double aq = e.alpha * e.q, bq = beta * e.q;
  if (aq < 2.0 && e.r > 2.0 * e.q / (2.0 - aq)) fail("r <= 2q / (2 - alpha q)");
  if (aq == 2.0 && std::isinf(e.r)) fail("r < infinity when alpha q = 2");
  if (bq < n && e.p > n * e.q / (n - bq)) fail("p <= n q / (n - beta q)");
  if (bq == n && std::isinf(e.p)) fail("p < infinity when beta q = n");
}

namespace {

double mixed_norm(const Samples& s, const Eigen::VectorXd& weights, double p, double r) {
  std::vector<double> per_t(s.nt, 0.0);
  const double cell = 1.0 / (static_cast<double>(s.nx) * s.nx);
  for (int it = 0; it < s.nt; ++it) {
    double acc = 0.0;
    for (int i1 = 0; i1 < s.nx; ++i1)
      for (int i2 = 0; i2 < s.nx; ++i2)
        for (int j = 0; j < s.nodes; ++j) {
          double mag2 = 0.0;
          for (int c = 0; c < s.components; ++c) mag2 += std::norm(s(it, i1, i2, j, c));
          const double mag = std::sqrt(mag2);
          if (std::isinf(p)) acc = std::max(acc, mag);
          else acc += cell * weights(j) * std::pow(mag, p);
        }
    per_t[it] = std::isinf(p) ? acc : std::pow(acc, 1.0 / p);
  }
  double out = 0.0;
  for (double v : per_t) out = std::isinf(r) ? std::max(out, v) : out + std::pow(v, r) / s.nt;
  return std::isinf(r) ? out : std::pow(out, 1.0 / r);
}

}  // namespace

double embedding_ratio(const SpectralField& u, const EmbeddingParams& e) {
  check_embedding_params(e, 3);
  SpectralField d = u;
  for (int i = 0; i < e.mt; ++i) d = d.dt();
  for (int axis = 1; axis <= 3; ++axis)
    for (int i = 0; i < e.mx[axis - 1]; ++i) d = d.dx(axis);
  const double rhs = sobolev_norm(u, {static_cast<double>(e.m), 0.0, e.q, NormDomain::slab}) +
                     sobolev_norm(u, {0.0, 2.0 * e.m, e.q, NormDomain::slab});
  if (rhs == 0.0) return 0.0;
  const TorusGrid& g = u.grid();
  const Samples s = inverse_transform_padded(d, 2 * g.nt() + 1, 2 * g.nx() + 1);
  return mixed_norm(s, g.cheb().weights, e.p, e.r) / rhs;
}

double embedding_ratio(const PlateField& eta, const EmbeddingParams& e) {
  check_embedding_params(e, 2);
  PlateField d = eta;
  for (int i = 0; i < e.mt; ++i) d = d.dt();
  for (int axis = 1; axis <= 2; ++axis)
    for (int i = 0; i < e.mx[axis - 1]; ++i) d = d.dx(axis);
  const double rhs = sobolev_norm(eta, {static_cast<double>(e.m), 0.0, e.q, NormDomain::plate}) +
                     sobolev_norm(eta, {0.0, 2.0 * e.m, e.q, NormDomain::plate});
  if (rhs == 0.0) return 0.0;
  const TorusGrid& g = eta.grid();
  const Samples s = inverse_transform_plate_padded(d, 2 * g.nt() + 1, 2 * g.nx() + 1);
  return mixed_norm(s, Eigen::VectorXd::Ones(1), e.p, e.r) / rhs;
}

// ---------------------------------------------------------------- random data

SpectralField random_field(const TorusGrid& grid, int components, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  SpectralField f(grid, components, true);
  const int N = grid.nz();
  // T_j(2 x3 - 1) at the nodes, j < N
  Eigen::MatrixXd basis(grid.nodes(), N);
  for (int i = 0; i < grid.nodes(); ++i)
    for (int j = 0; j < N; ++j) basis(i, j) = std::cos(j * std::acos(std::clamp(2.0 * grid.x3()(i) - 1.0, -1.0, 1.0)));
  for (std::size_t o = 0; o < grid.mode_count(); ++o) {
    const ModeIndex m = grid.mode_at(o);
    if (m.conjugate() < m) continue;
    const bool self = m == m.conjugate();
    for (int c = 0; c < components; ++c) {
      Eigen::VectorXcd coef(N);
      for (int j = 0; j < N; ++j)
        coef(j) = std::exp(-0.25 * j) * (self ? cplx(n(rng)) : cplx(n(rng), n(rng)) / std::sqrt(2.0));
      const Eigen::VectorXcd p = basis.cast<cplx>() * coef;
      f.set_profile(m, c, p);
      if (!self) f.set_profile(m.conjugate(), c, p.conjugate());
    }
  }
  return f;
}

PlateField random_plate(const TorusGrid& grid, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  PlateField h(grid, true);
  for (std::size_t o = 0; o < grid.mode_count(); ++o) {
    const ModeIndex m = grid.mode_at(o);
    if (m.conjugate() < m || m.lateral_zero()) continue;
    const cplx v(n(rng), n(rng));
    h(m) = v / std::sqrt(2.0);
    h(m.conjugate()) = std::conj(v) / std::sqrt(2.0);
  }
  return h;
}

SpectralField random_divergence(const TorusGrid& grid, std::uint64_t seed) {
  SpectralField g = random_field(grid, 1, seed);
  const Eigen::VectorXd& w = grid.cheb().weights;
  for (int k = -grid.kt_max(); k <= grid.kt_max(); ++k) {
    Eigen::VectorXcd p = g.profile({k, 0, 0}, 0);
    p.array() -= w.cast<cplx>().dot(p);
    g.set_profile({k, 0, 0}, 0, p);
  }
  return g;
}

// ---------------------------------------------------------------- suite

nlohmann::json run_validation_suite(const SolverConfig& cfg, int cases, std::uint64_t seed) {
  const TorusGrid grid = cfg.grid();
  nlohmann::json oracles = nlohmann::json::array();
  bool all = true;
  auto record = [&](const std::string& name, double value, double bound, nlohmann::json extra = {}) {
    const bool pass = std::isfinite(value) && value < bound;
    all = all && pass;
    nlohmann::json j = {{"oracle", name}, {"value", value}, {"bound", bound}, {"pass", pass}};
    if (!extra.is_null()) j["details"] = std::move(extra);
    oracles.push_back(std::move(j));
  };

  double round_trip = 0.0, fd = 0.0;
  for (int i = 0; i < cases; ++i) {
    const SpectralField f = random_field(grid, 3, seed + i);
    const SpectralField back = forward_transform(inverse_transform(f), grid, true);
    round_trip = std::max(round_trip, (back.coeffs() - f.coeffs()).cwiseAbs().maxCoeff());
    const SpectralField s = random_field(grid, 1, seed + 1000 + i);
    const double scale = 1.0 + s.max_abs() * std::max(grid.nt(), grid.nx());
    for (int d = 0; d < 4; ++d) fd = std::max(fd, fd_check(s, d) / scale);
  }
  record("transform_round_trip", round_trip, 1e-12);
  record("fd_derivatives", fd, 1e-6);

  SolverConfig cv = cfg;
  cv.nz = std::max(cfg.nz, 32);
  cv.nt = std::max(cfg.nt, 3);
  cv.nx = std::max(cfg.nx, 3);
  double constraint = 0.0, discrepancy = 0.0, truth = 0.0;
  for (int i = 0; i < cases; ++i) {
    ManufacturedOptions o;
    o.mu_f = cfg.mu_f;
    o.mu_s = cfg.mu_s;
    const ManufacturedCase c = make_manufactured(seed + 2000 + i, o, cfg.period_t, cfg.period_x);
    constraint = std::max(constraint, c.constraint_residual());
    const CrossValidationReport r = cross_validate_linear(c, cv);
    discrepancy = std::max(discrepancy, r.path_discrepancy / std::max(r.truth_norm, 1e-300));
    truth = std::max({truth, r.lift_truth_error, r.direct_truth_error});
  }
  record("manufactured_constraints", constraint, 1e-13);
  record("dual_path_discrepancy", discrepancy, 1e-9, {{"nz", cv.nz}});
  record("manufactured_truth_error", truth, 1e-8, {{"nz", cv.nz}});

  double div = 0.0, bc = 0.0;
  for (int i = 0; i < cases; ++i) {
    const LiftResult l = lift_divergence(random_divergence(grid, seed + 3000 + i));
    div = std::max(div, l.residual_div);
    bc = std::max(bc, l.residual_bc);
  }
  record("lift_divergence_residual", div, 1e-10);
  record("lift_boundary_residual", bc, 1e-12);

  double emb = 0.0;
  for (int i = 0; i < cases; ++i) emb = std::max(emb, embedding_ratio(random_field(grid, 3, seed + 4000 + i), {}));
  record("embedding_ratio_sup", emb, INFINITY);

  return {{"pass", all}, {"cases", cases}, {"seed", seed}, {"oracles", oracles}};
}

}  // namespace plateflow
