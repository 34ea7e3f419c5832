#pragma once

#include <Eigen/Dense>

namespace plateflow {

// Chebyshev–Gauss–Lobatto machinery on [0, 1]. Node j sits at
// x3 = (1 - cos(j pi / N)) / 2, so node 0 is the plate face x3 = 0 and node N
// the rigid face x3 = 1.
struct ChebyshevBasis {
  explicit ChebyshevBasis(int degree);

  int degree;
  Eigen::VectorXd nodes;
  Eigen::MatrixXd d1;        // d/dx3 on the nodes
  Eigen::MatrixXd d2;        // d^2/dx3^2
  Eigen::VectorXd weights;   // Clenshaw–Curtis weights for the integral over [0, 1]
  Eigen::MatrixXd to_coeffs; // nodal values -> Chebyshev coefficients
  Eigen::MatrixXd antiderivative;  // nodal values -> nodal values of int_0^x3

  // Upsampling onto 2N+1 Clenshaw–Curtis nodes; makes products of two
  // degree-N interpolants integrate exactly.
  Eigen::MatrixXd upsample;
  Eigen::VectorXd fine_weights;

  // Least-squares solution of [D; e_0; e_N] v = [g; 0; 0]: the antiderivative of a
  // mean-free profile vanishing at both faces.
  Eigen::MatrixXd zero_end_integral;

  int size() const { return degree + 1; }
};

Eigen::VectorXd gauss_lobatto_nodes(int degree);
Eigen::MatrixXd differentiation_matrix(int degree);
Eigen::VectorXd clenshaw_curtis_weights(int degree);

/// Rows evaluate the degree-N interpolant through the nodes at `points` (any x3).
Eigen::MatrixXd interpolation_matrix(int degree, const Eigen::VectorXd& points);

/// Clenshaw evaluation of sum_n c_n T_n(1 - 2 x3).
template <typename Derived>
typename Derived::Scalar evaluate_chebyshev(const Eigen::MatrixBase<Derived>& coeffs, double x3) {
  using Scalar = typename Derived::Scalar;
  const double s = 1.0 - 2.0 * x3;
  Scalar b1(0), b2(0);
  for (Eigen::Index n = coeffs.size() - 1; n >= 1; --n) {
    const Scalar b0 = coeffs(n) + 2.0 * s * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return coeffs(0) + s * b1 - b2;
}

/// Spectral derivative of a nodal profile (order 1 or 2).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime> cheb_derivative(
    const ChebyshevBasis& basis, const Eigen::MatrixBase<Derived>& profile, int order) {
  if (order == 1) return basis.d1 * profile;
  return basis.d2 * profile;
}

/// Integral over [0, 1] of a nodal profile.
template <typename Derived>
typename Derived::Scalar cheb_integral(const ChebyshevBasis& basis, const Eigen::MatrixBase<Derived>& profile) {
  return basis.weights.template cast<typename Derived::Scalar>().dot(profile);
}

/// Exact int_0^1 a conj(b) for the degree-N interpolants of a and b.
template <typename DA, typename DB>
std::complex<double> cheb_inner(const ChebyshevBasis& basis, const Eigen::MatrixBase<DA>& a,
                                const Eigen::MatrixBase<DB>& b) {
  const Eigen::VectorXcd fa = basis.upsample.cast<std::complex<double>>() * a.template cast<std::complex<double>>();
  const Eigen::VectorXcd fb = basis.upsample.cast<std::complex<double>>() * b.template cast<std::complex<double>>();
  std::complex<double> acc(0.0);
  for (Eigen::Index j = 0; j < fa.size(); ++j) acc += basis.fine_weights(j) * fa(j) * std::conj(fb(j));
  return acc;
}

}  // namespace plateflow
