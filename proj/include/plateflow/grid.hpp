#pragma once

#include <complex>
#include <compare>
#include <memory>
#include <numbers>

#include "plateflow/chebyshev.hpp"

namespace plateflow {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// A lattice point (k, xi') of the dual group, in integer units of 2pi/T and 2pi/L.
struct ModeIndex {
  int k = 0;
  int m1 = 0;
  int m2 = 0;

  bool lateral_zero() const { return m1 == 0 && m2 == 0; }
  ModeIndex conjugate() const { return {-k, -m1, -m2}; }
  auto operator<=>(const ModeIndex&) const = default;
};

/// Discretisation of T x T0^2 x (0, 1): odd Fourier counts in t and x', and a
/// Chebyshev–Gauss–Lobatto grid of degree nz in x3.
class TorusGrid {
 public:
  TorusGrid(int nt, int nx, int nz, double period_t = two_pi, double period_x = two_pi);

  int nt() const { return nt_; }
  int nx() const { return nx_; }
  int nz() const { return nz_; }
  int nodes() const { return nz_ + 1; }
  int kt_max() const { return (nt_ - 1) / 2; }
  int kx_max() const { return (nx_ - 1) / 2; }
  double period_t() const { return period_t_; }
  double period_x() const { return period_x_; }

  /// Physical time frequency 2 pi k / T.
  double omega(int k) const { return two_pi * k / period_t_; }
  /// Physical wave number 2 pi m / L.
  double wavenumber(int m) const { return two_pi * m / period_x_; }
  double xi_norm2(int m1, int m2) const {
    const double a = wavenumber(m1), b = wavenumber(m2);
    return a * a + b * b;
  }

  std::size_t mode_count() const { return static_cast<std::size_t>(nt_) * nx_ * nx_; }
  std::size_t mode_offset(int k, int m1, int m2) const {
    return (static_cast<std::size_t>(k + kt_max()) * nx_ + (m1 + kx_max())) * nx_ + (m2 + kx_max());
  }
  ModeIndex mode_at(std::size_t offset) const;
  bool contains(const ModeIndex& m) const {
    return std::abs(m.k) <= kt_max() && std::abs(m.m1) <= kx_max() && std::abs(m.m2) <= kx_max();
  }

  const ChebyshevBasis& cheb() const { return *cheb_; }
  const Eigen::VectorXd& x3() const { return cheb_->nodes; }

  double t_sample(int i) const { return period_t_ * i / nt_; }
  double x_sample(int i) const { return period_x_ * i / nx_; }

  /// Same (t, x') lattice with a different Chebyshev degree.
  TorusGrid with_nz(int nz) const { return TorusGrid(nt_, nx_, nz, period_t_, period_x_); }
  TorusGrid with_modes(int nt, int nx) const { return TorusGrid(nt, nx, nz_, period_t_, period_x_); }

  bool operator==(const TorusGrid& o) const {
    return nt_ == o.nt_ && nx_ == o.nx_ && nz_ == o.nz_ && period_t_ == o.period_t_ && period_x_ == o.period_x_;
  }

 private:
  int nt_, nx_, nz_;
  double period_t_, period_x_;
  std::shared_ptr<const ChebyshevBasis> cheb_;
};

}  // namespace plateflow
