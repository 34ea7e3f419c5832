#include "plateflow/nonlinear.hpp"

#include <chrono>
#include <cmath>

#include "plateflow/norms.hpp"

namespace plateflow {

int dealias_size(int n) {
  int m = (3 * n + 1) / 2;
  return m % 2 ? m : m + 1;
}

cplx evaluate_plate(const PlateField& eta, double t, double x1, double x2) {
  const TorusGrid& g = eta.grid();
  cplx v(0.0);
  for (std::size_t o = 0; o < g.mode_count(); ++o) {
    const ModeIndex m = g.mode_at(o);
    const cplx c = eta.coeffs()(static_cast<Eigen::Index>(o));
    if (c == cplx(0.0)) continue;
    v += c * std::exp(I * (g.omega(m.k) * t + g.wavenumber(m.m1) * x1 + g.wavenumber(m.m2) * x2));
  }
  return v;
}

// ---------------------------------------------------------------- geometry

Deformation::Deformation(const PlateField& eta) : eta_(eta), sup_(sup_norm(eta)) {
  if (sup_ >= 1.0) throw Error(ErrorKind::degenerate, "sup |eta| = " + std::to_string(sup_) + " >= 1: phi_eta is not a bijection");
}

Eigen::Vector3d Deformation::map(double t, const Eigen::Vector3d& x) const {
  const double e = evaluate_plate(eta_, t, x(0), x(1)).real();
  return {x(0), x(1), x(2) - (1.0 - x(2)) * e};
}

Eigen::Vector3d Deformation::inverse(double t, const Eigen::Vector3d& y) const {
  const double e = evaluate_plate(eta_, t, y(0), y(1)).real();
  return {y(0), y(1), (y(2) + e) / (1.0 + e)};
}

Eigen::Vector3d deform_map(const PlateField& eta, double t, const Eigen::Vector3d& x) {
  return Deformation(eta).map(t, x);
}

Eigen::Vector3d deform_inverse(const PlateField& eta, double t, const Eigen::Vector3d& y) {
  return Deformation(eta).inverse(t, y);
}

namespace {

struct Lattice {
  int mt, mx;
};

Lattice lattice_for(const TorusGrid& g, bool dealias) {
  return dealias ? Lattice{dealias_size(g.nt()), dealias_size(g.nx())} : Lattice{g.nt(), g.nx()};
}

// physical plate quantities on the padded lattice
struct PlateSamples {
  Samples eta, eta_t, eta_1, eta_2, lap;
};

PlateSamples plate_samples(const PlateField& eta, Lattice l) {
  const PlateField e1 = eta.dx(1), e2 = eta.dx(2);
  return {inverse_transform_plate_padded(eta, l.mt, l.mx), inverse_transform_plate_padded(eta.dt(), l.mt, l.mx),
          inverse_transform_plate_padded(e1, l.mt, l.mx), inverse_transform_plate_padded(e2, l.mt, l.mx),
          inverse_transform_plate_padded(e1.dx(1) + e2.dx(2), l.mt, l.mx)};
}

void check_gate(const Samples& eta) {
  for (Eigen::Index i = 0; i < eta.values.size(); ++i)
    if (std::abs(eta.values(i)) >= 1.0) throw Error(ErrorKind::degenerate, "|eta| >= 1 on the lattice");
}

bool all_real(const SpectralField& a, const SpectralField& b, const PlateField& c) {
  return a.is_real() && b.is_real() && c.is_real();
}

}  // namespace

std::array<SpectralField, 9> e_matrix(const PlateField& eta, bool dealias) {
  const TorusGrid& g = eta.grid();
  const Lattice l = lattice_for(g, dealias);
  const PlateSamples ps = plate_samples(eta, l);
  check_gate(ps.eta);
  const int n = g.nodes();
  Samples e31(l.mt, l.mx, n, 1), e32(l.mt, l.mx, n, 1), e33(l.mt, l.mx, n, 1);
  for (int it = 0; it < l.mt; ++it)
    for (int i1 = 0; i1 < l.mx; ++i1)
      for (int i2 = 0; i2 < l.mx; ++i2) {
        const cplx a = 1.0 / (1.0 + ps.eta(it, i1, i2));
        for (int j = 0; j < n; ++j) {
          const double rho = 1.0 - g.x3()(j);
          e31(it, i1, i2, j) = rho * ps.eta_1(it, i1, i2) * a;
          e32(it, i1, i2, j) = rho * ps.eta_2(it, i1, i2) * a;
          e33(it, i1, i2, j) = -ps.eta(it, i1, i2) * a;
        }
      }
  const bool real = eta.is_real();
  std::array<SpectralField, 9> E{SpectralField(g, 1, real), SpectralField(g, 1, real), SpectralField(g, 1, real),
                                 SpectralField(g, 1, real), SpectralField(g, 1, real), SpectralField(g, 1, real),
                                 forward_transform_padded(e31, g, real), forward_transform_padded(e32, g, real),
                                 forward_transform_padded(e33, g, real)};
  return E;
}

Samples normal_vector(const PlateField& eta, bool dealias) {
  const Lattice l = lattice_for(eta.grid(), dealias);
  const PlateSamples ps = plate_samples(eta, l);
  Samples nu(l.mt, l.mx, 1, 3);
  for (int it = 0; it < l.mt; ++it)
    for (int i1 = 0; i1 < l.mx; ++i1)
      for (int i2 = 0; i2 < l.mx; ++i2) {
        const cplx a = ps.eta_1(it, i1, i2), b = ps.eta_2(it, i1, i2);
        const cplx s = 1.0 / std::sqrt(1.0 + a * a + b * b);
        nu(it, i1, i2, 0, 0) = a * s;
        nu(it, i1, i2, 0, 1) = b * s;
        nu(it, i1, i2, 0, 2) = -s;
      }
  return nu;
}

NonlinearTerms compute_nonlinear_terms(const SpectralField& u, const SpectralField& p, const PlateField& eta,
                                       double mu, bool dealias) {
  const TorusGrid& g = u.grid();
  if (u.components() != 3 || p.components() != 1) throw Error(ErrorKind::shape, "expected u with 3 and p with 1 component");
  const Lattice l = lattice_for(g, dealias);
  const PlateSamples ps = plate_samples(eta, l);
  check_gate(ps.eta);
  const int n = g.nodes();
  auto synth = [&](const SpectralField& f) { return inverse_transform_padded(f, l.mt, l.mx); };
  const SpectralField u3 = u.dx(3);
  const Samples U = synth(u), D1 = synth(u.dx(1)), D2 = synth(u.dx(2)), D3 = synth(u3);
  const Samples D13 = synth(u3.dx(1)), D23 = synth(u3.dx(2)), D33 = synth(u.dx3(2));
  const Samples P = synth(p), P3 = synth(p.dx(3));

  Samples rf(l.mt, l.mx, n, 3), conv(l.mt, l.mx, n, 3), rd(l.mt, l.mx, n, 3), reta(l.mt, l.mx, 1, 1);
  std::array<Samples, 9> S;
  for (auto& s : S) s = Samples(l.mt, l.mx, 1, 1);
  for (int it = 0; it < l.mt; ++it)
    for (int i1 = 0; i1 < l.mx; ++i1)
      for (int i2 = 0; i2 < l.mx; ++i2) {
        const cplx h = ps.eta(it, i1, i2), ht = ps.eta_t(it, i1, i2);
        const cplx h1 = ps.eta_1(it, i1, i2), h2 = ps.eta_2(it, i1, i2), lap = ps.lap(it, i1, i2);
        const cplx a = 1.0 / (1.0 + h);
        for (int j = 0; j < n; ++j) {
          const double rho = 1.0 - g.x3()(j);
          const cplx E[3] = {rho * h1 * a, rho * h2 * a, -h * a};
          const cplx E2 = E[0] * E[0] + E[1] * E[1] + E[2] * E[2];
          // sum_j d_j E_3j + E_3j d_3 E_3j
          const cplx c1 = rho * lap * a - 2.0 * rho * (h1 * h1 + h2 * h2) * a * a;
          cplx ue(0.0);
          for (int k = 0; k < 3; ++k) ue += E[k] * U(it, i1, i2, j, k);
          const cplx p3 = P3(it, i1, i2, j);
          for (int i = 0; i < 3; ++i) {
            const cplx d3 = D3(it, i1, i2, j, i);
            const cplx second = 2.0 * (E[0] * D13(it, i1, i2, j, i) + E[1] * D23(it, i1, i2, j, i) +
                                       E[2] * D33(it, i1, i2, j, i)) +
                                E2 * D33(it, i1, i2, j, i);
            const cplx pres = i < 2 ? p3 * a * rho * (i == 0 ? h1 : h2) : -p3 * a * h;
            const cplx r = mu * (second + c1 * d3) - d3 * rho * ht * a - pres - d3 * ue;
            const cplx cv = U(it, i1, i2, j, 0) * D1(it, i1, i2, j, i) + U(it, i1, i2, j, 1) * D2(it, i1, i2, j, i) +
                            U(it, i1, i2, j, 2) * d3;
            conv(it, i1, i2, j, i) = cv;
            rf(it, i1, i2, j, i) = r - cv;
          }
          rd(it, i1, i2, j, 0) = -h * U(it, i1, i2, j, 0);
          rd(it, i1, i2, j, 1) = -h * U(it, i1, i2, j, 1);
          rd(it, i1, i2, j, 2) = -rho * (h1 * U(it, i1, i2, j, 0) + h2 * U(it, i1, i2, j, 1));
        }
        // plate face: x3 = 0, rho = 1
        const cplx E[3] = {h1 * a, h2 * a, -h * a};
        cplx grad[3][3];  // grad[i][k] = d_k u_i
        for (int i = 0; i < 3; ++i) {
          grad[i][0] = D1(it, i1, i2, 0, i);
          grad[i][1] = D2(it, i1, i2, 0, i);
          grad[i][2] = D3(it, i1, i2, 0, i);
        }
        cplx s[3][3];
        for (int i = 0; i < 3; ++i)
          for (int k = 0; k < 3; ++k) {
            s[i][k] = mu * (grad[i][2] * E[k] + grad[k][2] * E[i]);
            S[3 * i + k](it, i1, i2) = s[i][k];
          }
        const cplx sq = 1.0 / std::sqrt(1.0 + h1 * h1 + h2 * h2);
        const cplx nu[3] = {h1 * sq, h2 * sq, -sq};
        cplx r(0.0);
        for (int k = 0; k < 3; ++k) {
          const cplx t3k = mu * (grad[2][k] + grad[k][2]) - (k == 2 ? P(it, i1, i2, 0) : cplx(0.0));
          r += t3k * (nu[k] + (k == 2 ? 1.0 : 0.0)) + s[2][k] * nu[k];
        }
        reta(it, i1, i2) = r;
      }
  const bool real = all_real(u, p, eta);
  auto plate = [&](int i) { return forward_transform_plate_padded(S[i], g, real); };
  SpectralField rd_vec = forward_transform_padded(rd, g, real);
  SpectralField rd_div = divergence(rd_vec);
  rd_div.set_real(real);
  return NonlinearTerms{forward_transform_padded(rf, g, real),
                        forward_transform_padded(conv, g, real),
                        std::move(rd_vec),
                        std::move(rd_div),
                        forward_transform_plate_padded(reta, g, real),
                        {plate(0), plate(1), plate(2), plate(3), plate(4), plate(5), plate(6), plate(7), plate(8)}};
}

// ---------------------------------------------------------------- smallness and bounds

SmallnessReport smallness_check(const PlateField& eta, double eps0, double q) {
  SmallnessReport r;
  r.s_norm = plate_s_norm(eta, q);
  const TorusGrid& g = eta.grid();
  const Samples s = inverse_transform_plate_padded(eta, 2 * g.nt() + 1, 2 * g.nx() + 1);
  for (Eigen::Index i = 0; i < s.values.size(); ++i) {
    r.sup_eta = std::max(r.sup_eta, std::abs(s.values(i)));
    const double d = std::abs(1.0 + s.values(i));
    r.sup_inverse = std::max(r.sup_inverse, d > 0.0 ? 1.0 / d : INFINITY);
  }
  r.margin = eps0 - r.s_norm;
  if (r.s_norm > eps0) r.failed = "||eta||_S <= eps0";
  else if (r.sup_eta > 0.5) r.failed = "sup |eta| <= 1/2";
  else if (r.sup_inverse > 2.0) r.failed = "||1/(1+eta)||_inf <= 2";
  r.pass = r.failed.empty();
  return r;
}

static double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

BoundRatios nonlinear_bound_ratios(const SpectralField& u, const SpectralField& p, const PlateField& eta, double eps0,
                                   double q, double mu, bool dealias) {
  const NonlinearTerms t = compute_nonlinear_terms(u, p, eta, mu, dealias);
  const double un = parabolic_norm(u, q), sn = plate_s_norm(eta, q);
  const double gradp = std::pow(std::pow(lq_norm(p.dx(1), q), q) + std::pow(lq_norm(p.dx(2), q), q) +
                                    std::pow(lq_norm(p.dx(3), q), q),
                                1.0 / q);
  const double pn = sobolev_norm(p, {0.0, 1.0, q, NormDomain::slab});
  BoundRatios r;
  r.Rf = ratio(lq_norm(t.Rf_tilde, q), ((1.0 + eps0) * un + gradp + un * un) * sn);
  r.Rd = ratio(sobolev_norm(t.Rd_tilde, {0.0, 1.0, q, NormDomain::slab}) + negative_norm_time(t.Rd_tilde, 1.0, q),
               un * sn);
  r.Reta = ratio(sobolev_norm(t.R_eta, {0.0, 1.0 - 1.0 / q, q, NormDomain::plate}), (1.0 + eps0) * (sn * un + un + pn));
  const std::array<SpectralField, 9> E = e_matrix(eta, dealias);
  SpectralField e3(eta.grid(), 3);
  for (int k = 0; k < 3; ++k) e3.set_component(k, E[6 + k]);
  r.E = ratio(lq_norm(e3, q), sobolev_norm(eta, {0.0, 1.0, q, NormDomain::plate}));
  return r;
}

// ---------------------------------------------------------------- forcing

Forcing Forcing::zero(const TorusGrid& grid) { return Forcing(grid); }

Forcing Forcing::from_field(const SpectralField& f) {
  if (f.components() != 3) throw Error(ErrorKind::shape, "forcing needs 3 components");
  Forcing out(f.grid());
  out.field_ = f;
  return out;
}

Forcing Forcing::from_function(const TorusGrid& grid, Function fn) {
  Forcing out(grid);
  out.fn_ = std::move(fn);
  out.field_ = out.pullback(PlateField(grid, true));
  return out;
}

SpectralField Forcing::pullback(const PlateField& eta, bool dealias) const {
  if (!fn_) return field_;
  const Lattice l = lattice_for(grid_, dealias);
  const Samples e = inverse_transform_plate_padded(eta, l.mt, l.mx);
  const int n = grid_.nodes();
  Samples s(l.mt, l.mx, n, 3);
  double out[3];
  for (int it = 0; it < l.mt; ++it)
    for (int i1 = 0; i1 < l.mx; ++i1)
      for (int i2 = 0; i2 < l.mx; ++i2) {
        const double t = grid_.period_t() * it / l.mt;
        const double x1 = grid_.period_x() * i1 / l.mx, x2 = grid_.period_x() * i2 / l.mx;
        const double h = e(it, i1, i2).real();
        for (int j = 0; j < n; ++j) {
          const double x3 = grid_.x3()(j);
          fn_(t, x1, x2, x3 - (1.0 - x3) * h, out);
          for (int c = 0; c < 3; ++c) s(it, i1, i2, j, c) = out[c];
        }
      }
  return forward_transform_padded(s, grid_, true);
}

// ---------------------------------------------------------------- residual and Picard

NonlinearResidual nonlinear_residual(const SpectralField& u, const SpectralField& p, const PlateField& eta,
                                     const SpectralField& f_tilde, const PlateField& h, double mu_f, double mu_s,
                                     bool dealias) {
  const NonlinearTerms t = compute_nonlinear_terms(u, p, eta, mu_f, dealias);
  NonlinearResidual r;
  r.equations = linear_residual({u, p, eta}, f_tilde + t.Rf_tilde, t.Rd_tilde, h + t.R_eta, mu_f, mu_s);
  return r;
}

nlohmann::json PicardResult::trace_json() const {
  nlohmann::json j;
  j["epsilon"] = epsilon;
  j["radius"] = radius;
  j["converged"] = converged;
  j["steps"] = nlohmann::json::array();
  for (const PicardStep& s : trace)
    j["steps"].push_back({{"iteration", s.iteration}, {"x_norm", s.x_norm}, {"step", s.step}, {"ratio", s.ratio},
                          {"s_norm", s.s_norm}, {"sup_eta", s.sup_eta}, {"linear_residual", s.linear_residual},
                          {"seconds", s.seconds}});
  const LinearResidual& e = residual.equations;
  j["residual"] = {{"momentum", e.momentum}, {"continuity", e.continuity}, {"bc_bottom", e.bc_bottom},
                   {"bc_top", e.bc_top},     {"plate", e.plate},           {"plate_mean", e.plate_mean}};
  return j;
}

PicardResult picard_solve(const Forcing& f, const PlateField& h, const SolverConfig& cfg) {
  return picard_solve(ModeSolver(cfg), f, h, cfg);
}

PicardResult picard_solve(const ModeSolver& solver, const Forcing& f, const PlateField& h, const SolverConfig& cfg) {
  using clock = std::chrono::steady_clock;
  const TorusGrid& g = solver.grid();
  const double q = cfg.q, mu = solver.mu_f();
  PicardResult res{{SpectralField(g, 3, true), SpectralField(g, 1, true), PlateField(g, true)}, {}, false, 0.0, 0.0, {}};
  const SpectralField f0 = f.pullback(PlateField(g, true), cfg.dealias);
  res.epsilon = lq_norm(f0, q) + sobolev_norm(h, {0.0, 1.0 - 1.0 / q, q, NormDomain::plate});
  res.radius = std::sqrt(res.epsilon);

  double prev_step = 0.0;
  for (int it = 1; it <= cfg.max_iter; ++it) {
    const auto start = clock::now();
    const SolutionFields& x = res.fields;
    const SmallnessReport gate = smallness_check(x.eta, cfg.eps0, q);
    if (!gate.pass)
      throw Error(ErrorKind::degenerate, "smallness gate failed at iteration " + std::to_string(it) + ": " + gate.failed);
    const NonlinearTerms t = compute_nonlinear_terms(x.u, x.p, x.eta, mu, cfg.dealias);
    const SpectralField ft = f.pullback(x.eta, cfg.dealias);
    const LinearSolution next = solve_linear_full(solver, ft + t.Rf_tilde, t.Rd_tilde, h + t.R_eta, q);

    PicardStep s;
    s.iteration = it;
    s.step = x_norm(next.fields.u - x.u, next.fields.p - x.p, next.fields.eta - x.eta, q);
    s.x_norm = next.x_norm;
    s.ratio = it > 1 && prev_step > 0.0 ? s.step / prev_step : 0.0;
    s.s_norm = gate.s_norm;
    s.sup_eta = gate.sup_eta;
    s.linear_residual = next.residual.max();
    s.seconds = std::chrono::duration<double>(clock::now() - start).count();
    res.trace.push_back(s);
    res.fields = next.fields;

    if (s.x_norm > res.radius * (1.0 + 1e-12) + 1e-300)
      throw PicardDivergence("iterate left the ball of radius sqrt(eps) at iteration " + std::to_string(it),
                             res.trace_json());
    if (it > 1 && s.ratio >= 1.0)
      throw PicardDivergence("contraction ratio " + std::to_string(s.ratio) + " >= 1 at iteration " + std::to_string(it),
                             res.trace_json());
    if (s.step < cfg.picard_tol) {
      res.converged = true;
      break;
    }
    prev_step = s.step;
  }
  if (!res.converged)
    throw PicardDivergence("no convergence within " + std::to_string(cfg.max_iter) + " iterations", res.trace_json());
  const SpectralField ft = f.pullback(res.fields.eta, cfg.dealias);
  res.residual = nonlinear_residual(res.fields.u, res.fields.p, res.fields.eta, ft, h, mu, solver.mu_s(), cfg.dealias);
  return res;
}

}  // namespace plateflow
