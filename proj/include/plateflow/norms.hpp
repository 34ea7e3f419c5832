#pragma once

#include "plateflow/spectral_field.hpp"

namespace plateflow {

enum class NormDomain { slab, plate };

/// W^{a,q}(T; W^{s,q}(D)) with a = time_order, s = space_order, D = slab or plate.
/// Fractional and negative orders use Bessel-potential weights
/// (1 + omega^2)^{a/2} (1 + |xi'|^2)^{s/2}. s = -1 on the slab means the
/// homogeneous dual norm computed by negative_norm.
struct NormSpec {
  double time_order = 0.0;
  double space_order = 0.0;
  double q = 2.0;
  NormDomain domain = NormDomain::slab;
};

/// Slab norm. For integer part j <= floor(s) of the x3 order the j-th x3 derivative
/// carries lateral weight (1 + |xi'|^2)^{(s-j)/2}; the q-th powers are summed.
double sobolev_norm(const SpectralField& f, const NormSpec& spec);
double sobolev_norm(const PlateField& f, const NormSpec& spec);

/// Neumann potential of one lateral mode: (|xi'|^2 - d^2/dx3^2) phi = g,
/// phi'(0) = phi'(1) = 0. At xi' = 0 the mean of g is dropped and phi has zero mean.
Eigen::VectorXcd neumann_potential(const ChebyshevBasis& basis, double xi2, const Eigen::VectorXcd& g);

/// Dual norm of the slice g(t, .) against gradients: the norm of grad phi where phi
/// is the Neumann potential. Exact for q = 2; for other q the same potential's
/// gradient is measured in L^q.
double negative_norm(const SpectralField& g, double q, double t = 0.0);

/// W^{a,q}(T; dual W^{-1,q}) norm of a scalar field.
double negative_norm_time(const SpectralField& g, double time_order, double q);

/// Parabolic norm W^{1,q}(T; L^q) + L^q(T; W^{2,q}) of a velocity field.
double parabolic_norm(const SpectralField& u, double q);
/// S^q norm W^{2,q}(T; W^{1-1/q,q}) + L^q(T; W^{5-1/q,q}) of a plate field.
double plate_s_norm(const PlateField& eta, double q);

/// Sum of the component norms of the solution space X^q.
double x_norm(const SpectralField& u, const SpectralField& p, const PlateField& eta, double q);
/// Sum of the component norms of the data space Y^q.
double y_norm(const SpectralField& f, const SpectralField& g, const PlateField& h, double q);

/// L^q(T x Omega) and L^q(T x T0^2) norms, normalized in (t, x').
double lq_norm(const SpectralField& f, double q);
double lq_norm(const PlateField& f, double q);
/// Max modulus over the sample lattice (plate) or lattice x nodes (slab).
double sup_norm(const SpectralField& f);
double sup_norm(const PlateField& f);

}  // namespace plateflow
