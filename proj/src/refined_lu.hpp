#pragma once

#include <Eigen/Dense>
#include <complex>
#include <type_traits>

namespace plateflow {

// LU with residual correction in extended precision.
template <typename Scalar>
struct RefinedLU {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Wide = std::conditional_t<std::is_same_v<Scalar, double>, long double, std::complex<long double>>;

  Eigen::Matrix<Wide, Eigen::Dynamic, Eigen::Dynamic> a;
  Eigen::PartialPivLU<Matrix> lu;

  void compute(const Matrix& m) {
    a = m.template cast<Wide>();
    lu.compute(m);
  }

  Vector solve(const Vector& b, int sweeps = 2) const {
    Vector x = lu.solve(b);
    for (int s = 0; s < sweeps; ++s) {
      const Eigen::Matrix<Wide, Eigen::Dynamic, 1> r = b.template cast<Wide>() - a * x.template cast<Wide>();
      x += lu.solve(Vector(r.template cast<Scalar>()));
    }
    return x;
  }
};

}  // namespace plateflow
