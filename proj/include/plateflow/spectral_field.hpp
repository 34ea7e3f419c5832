#pragma once

#include <Eigen/Dense>
#include <functional>

#include "plateflow/grid.hpp"

namespace plateflow {

/// Values on a uniform (t, x1, x2) lattice times a set of x3 nodes, row-major
/// (it, i1, i2, node, component). Plate samples use nodes = 1.
struct Samples {
  int nt = 0, nx = 0, nodes = 1, components = 1;
  Eigen::VectorXcd values;

  Samples() = default;
  Samples(int nt_, int nx_, int nodes_, int components_)
      : nt(nt_), nx(nx_), nodes(nodes_), components(components_),
        values(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(nt_) * nx_ * nx_ * nodes_ * components_)) {}

  Eigen::Index index(int it, int i1, int i2, int node = 0, int c = 0) const {
    return (((static_cast<Eigen::Index>(it) * nx + i1) * nx + i2) * nodes + node) * components + c;
  }
  cplx& operator()(int it, int i1, int i2, int node = 0, int c = 0) { return values(index(it, i1, i2, node, c)); }
  cplx operator()(int it, int i1, int i2, int node = 0, int c = 0) const { return values(index(it, i1, i2, node, c)); }
  double max_abs() const { return values.size() ? values.cwiseAbs().maxCoeff() : 0.0; }
  double max_imag() const { return values.size() ? values.imag().cwiseAbs().maxCoeff() : 0.0; }
};

class PlateField;

/// Coefficients over (k, xi', node, component) for fields on T x Omega.
class SpectralField {
 public:
  SpectralField(const TorusGrid& grid, int components, bool real = false);

  const TorusGrid& grid() const { return grid_; }
  int components() const { return components_; }
  int nodes() const { return grid_.nodes(); }
  bool is_real() const { return real_; }
  void set_real(bool r) { real_ = r; }

  Eigen::VectorXcd& coeffs() { return coeffs_; }
  const Eigen::VectorXcd& coeffs() const { return coeffs_; }

  Eigen::Index index(int k, int m1, int m2, int node, int c = 0) const {
    return (static_cast<Eigen::Index>(grid_.mode_offset(k, m1, m2)) * nodes() + node) * components_ + c;
  }
  cplx& operator()(int k, int m1, int m2, int node, int c = 0) { return coeffs_(index(k, m1, m2, node, c)); }
  cplx operator()(int k, int m1, int m2, int node, int c = 0) const { return coeffs_(index(k, m1, m2, node, c)); }

  Eigen::VectorXcd profile(const ModeIndex& m, int c = 0) const;
  void set_profile(const ModeIndex& m, int c, const Eigen::VectorXcd& values);
  void add_profile(const ModeIndex& m, int c, const Eigen::VectorXcd& values);

  SpectralField component(int c) const;
  void set_component(int c, const SpectralField& scalar);

  /// Spectral derivatives: d/dt, d/dx1, d/dx2 by symbol multiplication, d/dx3 by
  /// the Chebyshev matrix.
  SpectralField dt() const;
  SpectralField dx(int axis) const;
  SpectralField dx3(int order = 1) const;

  /// Same coefficients interpolated onto a grid that differs only in N_z.
  SpectralField with_nz(int nz) const;
  /// Coefficients embedded/truncated onto a grid with other mode counts.
  SpectralField with_modes(int nt, int nx) const;

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(cplx s);

  /// max |c(k, xi') - conj c(-k, -xi')| relative to max |c|.
  double conjugate_symmetry_error() const;
  double max_abs() const { return coeffs_.size() ? coeffs_.cwiseAbs().maxCoeff() : 0.0; }

 private:
  TorusGrid grid_;
  int components_;
  bool real_;
  Eigen::VectorXcd coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(cplx s, SpectralField a);

/// Coefficients over (k, xi') for fields on T x T0^2.
class PlateField {
 public:
  explicit PlateField(const TorusGrid& grid, bool real = false);

  const TorusGrid& grid() const { return grid_; }
  bool is_real() const { return real_; }
  void set_real(bool r) { real_ = r; }
  Eigen::VectorXcd& coeffs() { return coeffs_; }
  const Eigen::VectorXcd& coeffs() const { return coeffs_; }

  cplx& operator()(int k, int m1, int m2) { return coeffs_(static_cast<Eigen::Index>(grid_.mode_offset(k, m1, m2))); }
  cplx operator()(int k, int m1, int m2) const { return coeffs_(static_cast<Eigen::Index>(grid_.mode_offset(k, m1, m2))); }
  cplx& operator()(const ModeIndex& m) { return (*this)(m.k, m.m1, m.m2); }
  cplx operator()(const ModeIndex& m) const { return (*this)(m.k, m.m1, m.m2); }

  PlateField dt() const;
  PlateField dx(int axis) const;
  PlateField with_nz(int nz) const;
  PlateField with_modes(int nt, int nx) const;

  /// Max over k of |coeff(k, 0)|.
  double lateral_mean_max() const;

  PlateField& operator+=(const PlateField& o);
  PlateField& operator-=(const PlateField& o);
  PlateField& operator*=(cplx s);

  double conjugate_symmetry_error() const;
  double max_abs() const { return coeffs_.size() ? coeffs_.cwiseAbs().maxCoeff() : 0.0; }

 private:
  TorusGrid grid_;
  bool real_;
  Eigen::VectorXcd coeffs_;
};

PlateField operator+(PlateField a, const PlateField& b);
PlateField operator-(PlateField a, const PlateField& b);
PlateField operator*(cplx s, PlateField a);

/// Averaging transform: constant 1 -> coefficient 1 at (0, 0).
SpectralField forward_transform(const Samples& samples, const TorusGrid& grid, bool real = false);
Samples inverse_transform(const SpectralField& field);
PlateField forward_transform_plate(const Samples& samples, const TorusGrid& grid, bool real = false);
Samples inverse_transform_plate(const PlateField& field);

/// Synthesis on a finer (mt, mx) lattice (zero padding) and the matching
/// truncating analysis. Used for dealiased products.
Samples inverse_transform_padded(const SpectralField& field, int mt, int mx);
Samples inverse_transform_plate_padded(const PlateField& field, int mt, int mx);
SpectralField forward_transform_padded(const Samples& samples, const TorusGrid& grid, bool real = false);
PlateField forward_transform_plate_padded(const Samples& samples, const TorusGrid& grid, bool real = false);

/// Samples of a closed-form function on the grid's uniform lattice and x3 nodes.
Samples sample_function(const TorusGrid& grid, int components,
                        const std::function<void(double t, double x1, double x2, double x3, cplx* out)>& fn);
Samples sample_plate_function(const TorusGrid& grid, const std::function<cplx(double t, double x1, double x2)>& fn);

/// Time average P and its complement.
SpectralField project_steady(const SpectralField& f);
SpectralField project_oscillatory(const SpectralField& f);
PlateField project_steady(const PlateField& f);
PlateField project_oscillatory(const PlateField& f);

/// Node-0 (x3 = 0) values of one component.
PlateField trace_bottom(const SpectralField& f, int component = 0);
PlateField trace_top(const SpectralField& f, int component = 0);

/// Divergence of a 3-component field.
SpectralField divergence(const SpectralField& u);

}  // namespace plateflow
