#include "plateflow/norms.hpp"

#include <cmath>

#include "plateflow/errors.hpp"

namespace plateflow {

namespace {

double bessel(double x2, double order) { return std::pow(1.0 + x2, 0.5 * order); }

// Exact int_0^1 |v|^2 for a degree-N interpolant.
double profile_l2sq(const ChebyshevBasis& b, const Eigen::VectorXcd& v) { return cheb_inner(b, v, v).real(); }

// sum over the lattice x nodes of |v|^q with normalized lattice weight and CC weights.
double quadrature_q(const Samples& s, const Eigen::VectorXd& weights, double q) {
  double acc = 0.0;
  const double cell = 1.0 / (static_cast<double>(s.nt) * s.nx * s.nx);
  for (int it = 0; it < s.nt; ++it)
    for (int i1 = 0; i1 < s.nx; ++i1)
      for (int i2 = 0; i2 < s.nx; ++i2)
        for (int j = 0; j < s.nodes; ++j)
          for (int c = 0; c < s.components; ++c) acc += cell * weights(j) * std::pow(std::abs(s(it, i1, i2, j, c)), q);
  return acc;
}

SpectralField weighted_slab(const SpectralField& f, double a, double s, int dj, const Eigen::MatrixXd& dmat) {
  const TorusGrid& g = f.grid();
  SpectralField out(g, f.components(), f.is_real());
  for (std::size_t o = 0; o < g.mode_count(); ++o) {
    const ModeIndex m = g.mode_at(o);
    const double w = bessel(g.omega(m.k) * g.omega(m.k), a) * bessel(g.xi_norm2(m.m1, m.m2), s - dj);
    for (int c = 0; c < f.components(); ++c) out.set_profile(m, c, w * (dmat * f.profile(m, c)));
  }
  return out;
}

Eigen::MatrixXd power(const Eigen::MatrixXd& d, int j) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(d.rows(), d.cols());
  for (int i = 0; i < j; ++i) r = d * r;
  return r;
}

// Lateral slice at time t: sum_k c(k, xi', .) e^{i omega t}.
Eigen::VectorXcd slice_profile(const SpectralField& g, int m1, int m2, double t) {
  const TorusGrid& gr = g.grid();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(gr.nodes());
  for (int k = -gr.kt_max(); k <= gr.kt_max(); ++k) v += std::exp(I * gr.omega(k) * t) * g.profile({k, m1, m2});
  return v;
}

}  // namespace

Eigen::VectorXcd neumann_potential(const ChebyshevBasis& b, double xi2, const Eigen::VectorXcd& g) {
  const int n = b.degree;
  if (xi2 > 0.0) {
    Eigen::MatrixXcd a = (xi2 * Eigen::MatrixXd::Identity(n + 1, n + 1) - b.d2).cast<cplx>();
    Eigen::VectorXcd rhs = g;
    a.row(0) = b.d1.row(0).cast<cplx>();
    a.row(n) = b.d1.row(n).cast<cplx>();
    rhs(0) = rhs(n) = 0.0;
    return a.partialPivLu().solve(rhs);
  }
  const cplx mean = b.weights.cast<cplx>().dot(g);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n + 2, n + 1);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n + 2);
  a.topRows(n + 1) = (-b.d2).cast<cplx>();
  rhs.head(n + 1) = g.array() - mean;
  a.row(0) = b.d1.row(0).cast<cplx>();
  a.row(n) = b.d1.row(n).cast<cplx>();
  rhs(0) = rhs(n) = 0.0;
  a.row(n + 1) = b.weights.transpose().cast<cplx>();
  return a.colPivHouseholderQr().solve(rhs);
}

double sobolev_norm(const SpectralField& f, const NormSpec& spec) {
  if (spec.domain != NormDomain::slab) throw Error(ErrorKind::shape, "plate norm spec applied to a slab field");
  if (spec.space_order < -1.0) throw Error(ErrorKind::unsupported, "spatial order below -1 is not supported");
  if (!(spec.q > 1.0)) throw Error(ErrorKind::unsupported, "integrability exponent must exceed 1");
  if (spec.space_order < 0.0) {
    if (spec.space_order != -1.0) throw Error(ErrorKind::unsupported, "negative spatial orders other than -1 are not supported");
    if (f.components() != 1) throw Error(ErrorKind::shape, "negative norm needs a scalar field");
    return negative_norm_time(f, spec.time_order, spec.q);
  }
  const TorusGrid& g = f.grid();
  const ChebyshevBasis& b = g.cheb();
  const int jmax = static_cast<int>(std::floor(spec.space_order));
  double acc = 0.0;
  for (int j = 0; j <= jmax; ++j) {
    const Eigen::MatrixXd dj = power(b.d1, j);
    if (spec.q == 2.0) {
      for (std::size_t o = 0; o < g.mode_count(); ++o) {
        const ModeIndex m = g.mode_at(o);
        const double w = bessel(g.omega(m.k) * g.omega(m.k), spec.time_order) *
                         bessel(g.xi_norm2(m.m1, m.m2), spec.space_order - j);
        for (int c = 0; c < f.components(); ++c) {
          const Eigen::VectorXcd v = dj * f.profile(m, c);
          acc += w * w * profile_l2sq(b, v);
        }
      }
    } else {
      const SpectralField wf = weighted_slab(f, spec.time_order, spec.space_order, j, dj);
      acc += quadrature_q(inverse_transform(wf), b.weights, spec.q);
    }
  }
  return std::pow(acc, 1.0 / spec.q);
}

double sobolev_norm(const PlateField& f, const NormSpec& spec) {
  if (spec.space_order < -1.0) throw Error(ErrorKind::unsupported, "spatial order below -1 is not supported");
  if (!(spec.q > 1.0)) throw Error(ErrorKind::unsupported, "integrability exponent must exceed 1");
  const TorusGrid& g = f.grid();
  PlateField w(g, f.is_real());
  for (std::size_t o = 0; o < g.mode_count(); ++o) {
    const ModeIndex m = g.mode_at(o);
    w.coeffs()(o) = f.coeffs()(o) * bessel(g.omega(m.k) * g.omega(m.k), spec.time_order) *
                    bessel(g.xi_norm2(m.m1, m.m2), spec.space_order);
  }
  if (spec.q == 2.0) return w.coeffs().norm();
  return lq_norm(w, spec.q);
}

double negative_norm(const SpectralField& g, double q, double t) {
  if (g.components() != 1) throw Error(ErrorKind::shape, "negative norm needs a scalar field");
  const TorusGrid& gr = g.grid();
  const ChebyshevBasis& b = gr.cheb();
  const int nx = gr.nx(), kx = gr.kx_max();
  // gradient of the potential, per lateral mode and component
  std::vector<Eigen::VectorXcd> grad(static_cast<std::size_t>(nx) * nx * 3);
  double acc2 = 0.0;
  for (int m1 = -kx; m1 <= kx; ++m1)
    for (int m2 = -kx; m2 <= kx; ++m2) {
      const double xi2 = gr.xi_norm2(m1, m2);
      const Eigen::VectorXcd phi = neumann_potential(b, xi2, slice_profile(g, m1, m2, t));
      const std::size_t base = (static_cast<std::size_t>(m1 + kx) * nx + (m2 + kx)) * 3;
      grad[base + 0] = I * gr.wavenumber(m1) * phi;
      grad[base + 1] = I * gr.wavenumber(m2) * phi;
      grad[base + 2] = b.d1 * phi;
      if (q == 2.0)
        for (int c = 0; c < 3; ++c) acc2 += profile_l2sq(b, grad[base + c]);
    }
  if (q == 2.0) return std::sqrt(acc2);
  // lateral synthesis on the x' lattice, then L^q quadrature
  SpectralField gf(gr, 3);
  for (int m1 = -kx; m1 <= kx; ++m1)
    for (int m2 = -kx; m2 <= kx; ++m2) {
      const std::size_t base = (static_cast<std::size_t>(m1 + kx) * nx + (m2 + kx)) * 3;
      for (int c = 0; c < 3; ++c) gf.set_profile({0, m1, m2}, c, grad[base + c]);
    }
  const Samples s = inverse_transform(gf);  // constant in t
  return std::pow(quadrature_q(s, b.weights, q), 1.0 / q);
}

double negative_norm_time(const SpectralField& g, double time_order, double q) {
  const TorusGrid& gr = g.grid();
  if (q == 2.0) {
    const ChebyshevBasis& b = gr.cheb();
    double acc = 0.0;
    for (std::size_t o = 0; o < gr.mode_count(); ++o) {
      const ModeIndex m = gr.mode_at(o);
      const double xi2 = gr.xi_norm2(m.m1, m.m2);
      const Eigen::VectorXcd phi = neumann_potential(b, xi2, g.profile(m));
      const double w = bessel(gr.omega(m.k) * gr.omega(m.k), time_order);
      acc += w * w * (xi2 * profile_l2sq(b, phi) + profile_l2sq(b, Eigen::VectorXcd(b.d1 * phi)));
    }
    return std::sqrt(acc);
  }
  SpectralField w(g);
  for (std::size_t o = 0; o < gr.mode_count(); ++o) {
    const ModeIndex m = gr.mode_at(o);
    w.set_profile(m, 0, bessel(gr.omega(m.k) * gr.omega(m.k), time_order) * g.profile(m));
  }
  double acc = 0.0;
  for (int it = 0; it < gr.nt(); ++it) acc += std::pow(negative_norm(w, q, gr.t_sample(it)), q) / gr.nt();
  return std::pow(acc, 1.0 / q);
}

double parabolic_norm(const SpectralField& u, double q) {
  return sobolev_norm(u, {1.0, 0.0, q, NormDomain::slab}) + sobolev_norm(u, {0.0, 2.0, q, NormDomain::slab});
}

double plate_s_norm(const PlateField& eta, double q) {
  return sobolev_norm(eta, {2.0, 1.0 - 1.0 / q, q, NormDomain::plate}) +
         sobolev_norm(eta, {0.0, 5.0 - 1.0 / q, q, NormDomain::plate});
}

double x_norm(const SpectralField& u, const SpectralField& p, const PlateField& eta, double q) {
  return parabolic_norm(u, q) + sobolev_norm(p, {0.0, 1.0, q, NormDomain::slab}) + plate_s_norm(eta, q);
}

double y_norm(const SpectralField& f, const SpectralField& g, const PlateField& h, double q) {
  return sobolev_norm(f, {0.0, 0.0, q, NormDomain::slab}) + sobolev_norm(g, {0.0, 1.0, q, NormDomain::slab}) +
         negative_norm_time(g, 1.0, q) + sobolev_norm(h, {0.0, 1.0 - 1.0 / q, q, NormDomain::plate});
}

double lq_norm(const SpectralField& f, double q) { return sobolev_norm(f, {0.0, 0.0, q, NormDomain::slab}); }

double lq_norm(const PlateField& f, double q) {
  if (q == 2.0) return f.coeffs().norm();
  const Samples s = inverse_transform_plate(f);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < s.values.size(); ++i) acc += std::pow(std::abs(s.values(i)), q);
  return std::pow(acc / static_cast<double>(s.values.size()), 1.0 / q);
}

double sup_norm(const SpectralField& f) {
  const TorusGrid& g = f.grid();
  return inverse_transform_padded(f, 2 * g.nt() + 1, 2 * g.nx() + 1).max_abs();
}

double sup_norm(const PlateField& f) {
  const TorusGrid& g = f.grid();
  return inverse_transform_plate_padded(f, 2 * g.nt() + 1, 2 * g.nx() + 1).max_abs();
}

}  // namespace plateflow
