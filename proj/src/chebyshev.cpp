#include "plateflow/chebyshev.hpp"

#include <cmath>
#include <numbers>

#include "plateflow/errors.hpp"

namespace plateflow {

namespace {

// T_0 .. T_n at s by the three-term recurrence (valid off [-1, 1] too).
Eigen::VectorXd chebyshev_values(int n, double s) {
  Eigen::VectorXd t(n + 1);
  t(0) = 1.0;
  if (n >= 1) t(1) = s;
  for (int m = 2; m <= n; ++m) t(m) = 2.0 * s * t(m - 1) - t(m - 2);
  return t;
}

Eigen::MatrixXd values_to_coeffs(int degree) {
  const int n = degree;
  Eigen::MatrixXd a(n + 1, n + 1);
  for (int m = 0; m <= n; ++m) {
    for (int j = 0; j <= n; ++j) {
      double w = (j == 0 || j == n) ? 0.5 : 1.0;
      a(m, j) = 2.0 / n * w * std::cos(std::numbers::pi * m * j / n);
    }
  }
  a.row(0) *= 0.5;
  a.row(n) *= 0.5;
  return a;
}

}  // namespace

Eigen::VectorXd gauss_lobatto_nodes(int degree) {
  Eigen::VectorXd x(degree + 1);
  for (int j = 0; j <= degree; ++j) {
    // (1 - cos(j pi / N)) / 2 written as sin^2 to keep relative accuracy near x3 = 0
    const double s = std::sin(std::numbers::pi * j / (2.0 * degree));
    x(j) = s * s;
  }
  x(degree) = 1.0;
  return x;
}

Eigen::MatrixXd differentiation_matrix(int degree) {
  const int n = degree;
  const double pi = std::numbers::pi;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n + 1, n + 1);
  auto c = [n](int i) { return (i == 0 || i == n) ? 2.0 : 1.0; };
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      // s_i - s_j for s = cos(j pi / N), via the product formula
      const double diff = 2.0 * std::sin((j + i) * pi / (2.0 * n)) * std::sin((j - i) * pi / (2.0 * n));
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      d(i, j) = c(i) / c(j) * sign / diff;
    }
  }
  for (int i = 0; i <= n; ++i) {
    double sum = 0.0;
    for (int j = 0; j <= n; ++j)
      if (j != i) sum += d(i, j);
    d(i, i) = -sum;
  }
  // ds/dx3 = -2
  return -2.0 * d;
}

Eigen::VectorXd clenshaw_curtis_weights(int degree) {
  const int n = degree;
  const double pi = std::numbers::pi;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double theta = pi * j / n;
    double v = 1.0;
    if (n % 2 == 0) {
      if (j == 0 || j == n) {
        w(j) = 1.0 / (n * n - 1.0);
        continue;
      }
      for (int m = 1; m < n / 2; ++m) v -= 2.0 * std::cos(2.0 * m * theta) / (4.0 * m * m - 1.0);
      v -= std::cos(n * theta) / (n * n - 1.0);
    } else {
      if (j == 0 || j == n) {
        w(j) = 1.0 / (static_cast<double>(n) * n);
        continue;
      }
      for (int m = 1; m <= (n - 1) / 2; ++m) v -= 2.0 * std::cos(2.0 * m * theta) / (4.0 * m * m - 1.0);
    }
    w(j) = 2.0 * v / n;
  }
  // [-1, 1] -> [0, 1]
  return 0.5 * w;
}

Eigen::MatrixXd interpolation_matrix(int degree, const Eigen::VectorXd& points) {
  const Eigen::MatrixXd coeffs = values_to_coeffs(degree);
  Eigen::MatrixXd eval(points.size(), degree + 1);
  for (Eigen::Index r = 0; r < points.size(); ++r)
    eval.row(r) = chebyshev_values(degree, 1.0 - 2.0 * points(r)).transpose();
  return eval * coeffs;
}

ChebyshevBasis::ChebyshevBasis(int n) : degree(n) {
  if (n < 2) throw Error(ErrorKind::shape, "Chebyshev degree must be at least 2");
  nodes = gauss_lobatto_nodes(n);
  d1 = differentiation_matrix(n);
  d2 = d1 * d1;
  weights = clenshaw_curtis_weights(n);
  to_coeffs = values_to_coeffs(n);

  // Integration in s: int T_0 = T_1, int T_1 = T_2 / 4,
  // int T_m = T_{m+1} / (2(m+1)) - T_{m-1} / (2(m-1)).
  Eigen::MatrixXd integ = Eigen::MatrixXd::Zero(n + 2, n + 1);
  integ(1, 0) = 1.0;
  if (n >= 1) integ(2, 1) = 0.25;
  for (int m = 2; m <= n; ++m) {
    integ(m + 1, m) += 1.0 / (2.0 * (m + 1));
    integ(m - 1, m) -= 1.0 / (2.0 * (m - 1));
  }
  // int_0^x3 f dx3' = (F(s=1) - F(s)) / 2 with s = 1 - 2 x3.
  Eigen::MatrixXd eval(n + 1, n + 2);
  const Eigen::VectorXd at_one = chebyshev_values(n + 1, 1.0);
  for (int j = 0; j <= n; ++j) {
    const double s = std::cos(std::numbers::pi * j / n);
    eval.row(j) = 0.5 * (at_one - chebyshev_values(n + 1, s)).transpose();
  }
  antiderivative = eval * integ * to_coeffs;

  const Eigen::VectorXd fine = gauss_lobatto_nodes(2 * n);
  upsample = interpolation_matrix(n, fine);
  fine_weights = clenshaw_curtis_weights(2 * n);

  Eigen::MatrixXd a(n + 3, n + 1);
  a.topRows(n + 1) = d1;
  a.row(n + 1) = Eigen::RowVectorXd::Unit(n + 1, 0);
  a.row(n + 2) = Eigen::RowVectorXd::Unit(n + 1, n);
  const Eigen::MatrixXd pinv = a.completeOrthogonalDecomposition().pseudoInverse();
  zero_end_integral = pinv.leftCols(n + 1);
}

}  // namespace plateflow
