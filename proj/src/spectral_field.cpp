#include "plateflow/spectral_field.hpp"

#include <unsupported/Eigen/FFT>
#include <vector>

#include "plateflow/errors.hpp"

namespace plateflow {

namespace {

using Strided = Eigen::Map<Eigen::VectorXcd, 0, Eigen::InnerStride<>>;
using ConstStrided = Eigen::Map<const Eigen::VectorXcd, 0, Eigen::InnerStride<>>;

int wrap(int k, int m) { return ((k % m) + m) % m; }

// Coefficients (outer, n, inner) in signed order -> samples (outer, m, inner), plain sum.
Eigen::VectorXcd synth_axis(const Eigen::VectorXcd& in, Eigen::Index outer, int n, Eigen::Index inner, int m) {
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  const int half = (n - 1) / 2;
  Eigen::VectorXcd out(outer * m * inner);
  std::vector<cplx> buf(m), res(m);
  for (Eigen::Index o = 0; o < outer; ++o) {
    for (Eigen::Index i = 0; i < inner; ++i) {
      std::fill(buf.begin(), buf.end(), cplx(0.0));
      for (int p = 0; p < n; ++p) buf[wrap(p - half, m)] = in((o * n + p) * inner + i);
      fft.inv(res, buf);
      for (int j = 0; j < m; ++j) out((o * m + j) * inner + i) = res[j];
    }
  }
  return out;
}

// Samples (outer, m, inner) -> averaged coefficients (outer, n, inner), truncating.
Eigen::VectorXcd analyze_axis(const Eigen::VectorXcd& in, Eigen::Index outer, int m, Eigen::Index inner, int n) {
  Eigen::FFT<double> fft;
  const int half = (n - 1) / 2;
  Eigen::VectorXcd out(outer * n * inner);
  std::vector<cplx> buf(m), res(m);
  for (Eigen::Index o = 0; o < outer; ++o) {
    for (Eigen::Index i = 0; i < inner; ++i) {
      for (int j = 0; j < m; ++j) buf[j] = in((o * m + j) * inner + i);
      fft.fwd(res, buf);
      for (int p = 0; p < n; ++p) out((o * n + p) * inner + i) = res[wrap(p - half, m)] / static_cast<double>(m);
    }
  }
  return out;
}

Eigen::VectorXcd synth_lattice(const Eigen::VectorXcd& c, int nt, int nx, Eigen::Index inner, int mt, int mx) {
  if (mt < nt || mx < nx) throw Error(ErrorKind::shape, "padded lattice smaller than the mode lattice");
  Eigen::VectorXcd a = synth_axis(c, 1, nt, static_cast<Eigen::Index>(nx) * nx * inner, mt);
  Eigen::VectorXcd b = synth_axis(a, mt, nx, nx * inner, mx);
  return synth_axis(b, static_cast<Eigen::Index>(mt) * mx, nx, inner, mx);
}

Eigen::VectorXcd analyze_lattice(const Eigen::VectorXcd& s, int mt, int mx, Eigen::Index inner, int nt, int nx) {
  if (mt < nt || mx < nx) throw Error(ErrorKind::shape, "sample lattice smaller than the mode lattice");
  Eigen::VectorXcd a = analyze_axis(s, 1, mt, static_cast<Eigen::Index>(mx) * mx * inner, nt);
  Eigen::VectorXcd b = analyze_axis(a, nt, mx, mx * inner, nx);
  return analyze_axis(b, static_cast<Eigen::Index>(nt) * nx, mx, inner, nx);
}

template <typename F>
double symmetry_error(const TorusGrid& g, Eigen::Index block, const Eigen::VectorXcd& c, F offset) {
  double err = 0.0, scale = 0.0;
  for (int k = -g.kt_max(); k <= g.kt_max(); ++k)
    for (int m1 = -g.kx_max(); m1 <= g.kx_max(); ++m1)
      for (int m2 = -g.kx_max(); m2 <= g.kx_max(); ++m2) {
        const Eigen::Index a = offset(k, m1, m2), b = offset(-k, -m1, -m2);
        for (Eigen::Index j = 0; j < block; ++j) {
          err = std::max(err, std::abs(c(a * block + j) - std::conj(c(b * block + j))));
          scale = std::max(scale, std::abs(c(a * block + j)));
        }
      }
  return scale > 0.0 ? err / scale : 0.0;
}

}  // namespace

ModeIndex TorusGrid::mode_at(std::size_t offset) const {
  const int m2 = static_cast<int>(offset % nx_) - kx_max();
  offset /= nx_;
  const int m1 = static_cast<int>(offset % nx_) - kx_max();
  const int k = static_cast<int>(offset / nx_) - kt_max();
  return {k, m1, m2};
}

TorusGrid::TorusGrid(int nt, int nx, int nz, double period_t, double period_x)
    : nt_(nt), nx_(nx), nz_(nz), period_t_(period_t), period_x_(period_x) {
  if (nt < 3 || nt % 2 == 0) throw Error(ErrorKind::shape, "N_t must be odd and >= 3");
  if (nx < 3 || nx % 2 == 0) throw Error(ErrorKind::shape, "N_x must be odd and >= 3");
  if (nz < 4) throw Error(ErrorKind::shape, "N_z must be >= 4");
  if (!(period_t > 0.0) || !(period_x > 0.0)) throw Error(ErrorKind::shape, "periods must be positive");
  cheb_ = std::make_shared<const ChebyshevBasis>(nz);
}

// ---------------------------------------------------------------- SpectralField

SpectralField::SpectralField(const TorusGrid& grid, int components, bool real)
    : grid_(grid), components_(components), real_(real) {
  if (components != 1 && components != 3) throw Error(ErrorKind::shape, "components must be 1 or 3");
  coeffs_ = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.mode_count()) * grid.nodes() * components);
}

Eigen::VectorXcd SpectralField::profile(const ModeIndex& m, int c) const {
  return ConstStrided(coeffs_.data() + index(m.k, m.m1, m.m2, 0, c), nodes(), Eigen::InnerStride<>(components_));
}

void SpectralField::set_profile(const ModeIndex& m, int c, const Eigen::VectorXcd& values) {
  Strided(coeffs_.data() + index(m.k, m.m1, m.m2, 0, c), nodes(), Eigen::InnerStride<>(components_)) = values;
}

void SpectralField::add_profile(const ModeIndex& m, int c, const Eigen::VectorXcd& values) {
  Strided(coeffs_.data() + index(m.k, m.m1, m.m2, 0, c), nodes(), Eigen::InnerStride<>(components_)) += values;
}

SpectralField SpectralField::component(int c) const {
  SpectralField out(grid_, 1, real_);
  const Eigen::Index n = static_cast<Eigen::Index>(grid_.mode_count()) * nodes();
  out.coeffs_ = ConstStrided(coeffs_.data() + c, n, Eigen::InnerStride<>(components_));
  return out;
}

void SpectralField::set_component(int c, const SpectralField& scalar) {
  const Eigen::Index n = static_cast<Eigen::Index>(grid_.mode_count()) * nodes();
  Strided(coeffs_.data() + c, n, Eigen::InnerStride<>(components_)) = scalar.coeffs_;
}

SpectralField SpectralField::dt() const {
  SpectralField out(*this);
  const Eigen::Index block = nodes() * components_;
  for (std::size_t o = 0; o < grid_.mode_count(); ++o) {
    const ModeIndex m = grid_.mode_at(o);
    out.coeffs_.segment(o * block, block) *= I * grid_.omega(m.k);
  }
  return out;
}

SpectralField SpectralField::dx(int axis) const {
  if (axis == 3) return dx3(1);
  if (axis != 1 && axis != 2) throw Error(ErrorKind::shape, "axis must be 1, 2 or 3");
  SpectralField out(*this);
  const Eigen::Index block = nodes() * components_;
  for (std::size_t o = 0; o < grid_.mode_count(); ++o) {
    const ModeIndex m = grid_.mode_at(o);
    out.coeffs_.segment(o * block, block) *= I * grid_.wavenumber(axis == 1 ? m.m1 : m.m2);
  }
  return out;
}

SpectralField SpectralField::dx3(int order) const {
  SpectralField out(grid_, components_, real_);
  const Eigen::MatrixXcd d = (order == 1 ? grid_.cheb().d1 : grid_.cheb().d2).cast<cplx>();
  const Eigen::Index block = nodes() * components_;
  for (std::size_t o = 0; o < grid_.mode_count(); ++o)
    for (int c = 0; c < components_; ++c) {
      ConstStrided in(coeffs_.data() + o * block + c, nodes(), Eigen::InnerStride<>(components_));
      Strided(out.coeffs_.data() + o * block + c, nodes(), Eigen::InnerStride<>(components_)) = d * in;
    }
  return out;
}

SpectralField SpectralField::with_nz(int nz) const {
  const TorusGrid g = grid_.with_nz(nz);
  SpectralField out(g, components_, real_);
  const Eigen::MatrixXcd interp = interpolation_matrix(grid_.nz(), g.x3()).cast<cplx>();
  for (std::size_t o = 0; o < grid_.mode_count(); ++o) {
    const ModeIndex m = grid_.mode_at(o);
    for (int c = 0; c < components_; ++c) out.set_profile(m, c, interp * profile(m, c));
  }
  return out;
}

SpectralField SpectralField::with_modes(int nt, int nx) const {
  const TorusGrid g = grid_.with_modes(nt, nx);
  SpectralField out(g, components_, real_);
  for (std::size_t o = 0; o < g.mode_count(); ++o) {
    const ModeIndex m = g.mode_at(o);
    if (!grid_.contains(m)) continue;
    for (int c = 0; c < components_; ++c) out.set_profile(m, c, profile(m, c));
  }
  return out;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  if (!(grid_ == o.grid_) || components_ != o.components_) throw Error(ErrorKind::shape, "field shape mismatch");
  coeffs_ += o.coeffs_;
  real_ = real_ && o.real_;
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  if (!(grid_ == o.grid_) || components_ != o.components_) throw Error(ErrorKind::shape, "field shape mismatch");
  coeffs_ -= o.coeffs_;
  real_ = real_ && o.real_;
  return *this;
}

SpectralField& SpectralField::operator*=(cplx s) {
  coeffs_ *= s;
  if (s.imag() != 0.0) real_ = false;
  return *this;
}

double SpectralField::conjugate_symmetry_error() const {
  const TorusGrid& g = grid_;
  return symmetry_error(g, nodes() * components_, coeffs_,
                        [&g](int k, int m1, int m2) { return static_cast<Eigen::Index>(g.mode_offset(k, m1, m2)); });
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(cplx s, SpectralField a) { return a *= s; }

// ---------------------------------------------------------------- PlateField

PlateField::PlateField(const TorusGrid& grid, bool real)
    : grid_(grid), real_(real), coeffs_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.mode_count()))) {}

PlateField PlateField::dt() const {
  PlateField out(*this);
  for (std::size_t o = 0; o < grid_.mode_count(); ++o) out.coeffs_(o) *= I * grid_.omega(grid_.mode_at(o).k);
  return out;
}

PlateField PlateField::dx(int axis) const {
  if (axis != 1 && axis != 2) throw Error(ErrorKind::shape, "plate axis must be 1 or 2");
  PlateField out(*this);
  for (std::size_t o = 0; o < grid_.mode_count(); ++o) {
    const ModeIndex m = grid_.mode_at(o);
    out.coeffs_(o) *= I * grid_.wavenumber(axis == 1 ? m.m1 : m.m2);
  }
  return out;
}

PlateField PlateField::with_nz(int nz) const {
  PlateField out(grid_.with_nz(nz), real_);
  out.coeffs_ = coeffs_;
  return out;
}

PlateField PlateField::with_modes(int nt, int nx) const {
  const TorusGrid g = grid_.with_modes(nt, nx);
  PlateField out(g, real_);
  for (std::size_t o = 0; o < g.mode_count(); ++o) {
    const ModeIndex m = g.mode_at(o);
    if (grid_.contains(m)) out.coeffs_(o) = (*this)(m);
  }
  return out;
}

double PlateField::lateral_mean_max() const {
  double v = 0.0;
  for (int k = -grid_.kt_max(); k <= grid_.kt_max(); ++k) v = std::max(v, std::abs((*this)(k, 0, 0)));
  return v;
}

PlateField& PlateField::operator+=(const PlateField& o) {
  if (!(grid_.nt() == o.grid_.nt() && grid_.nx() == o.grid_.nx())) throw Error(ErrorKind::shape, "plate shape mismatch");
  coeffs_ += o.coeffs_;
  real_ = real_ && o.real_;
  return *this;
}

PlateField& PlateField::operator-=(const PlateField& o) {
  if (!(grid_.nt() == o.grid_.nt() && grid_.nx() == o.grid_.nx())) throw Error(ErrorKind::shape, "plate shape mismatch");
  coeffs_ -= o.coeffs_;
  real_ = real_ && o.real_;
  return *this;
}

PlateField& PlateField::operator*=(cplx s) {
  coeffs_ *= s;
  if (s.imag() != 0.0) real_ = false;
  return *this;
}

double PlateField::conjugate_symmetry_error() const {
  const TorusGrid& g = grid_;
  return symmetry_error(g, 1, coeffs_,
                        [&g](int k, int m1, int m2) { return static_cast<Eigen::Index>(g.mode_offset(k, m1, m2)); });
}

PlateField operator+(PlateField a, const PlateField& b) { return a += b; }
PlateField operator-(PlateField a, const PlateField& b) { return a -= b; }
PlateField operator*(cplx s, PlateField a) { return a *= s; }

// ---------------------------------------------------------------- transforms

SpectralField forward_transform(const Samples& s, const TorusGrid& grid, bool real) {
  if (s.nt != grid.nt() || s.nx != grid.nx() || s.nodes != grid.nodes())
    throw Error(ErrorKind::shape, "sample counts do not match the grid (N_t x N_x^2 x (N_z+1))");
  return forward_transform_padded(s, grid, real);
}

Samples inverse_transform(const SpectralField& f) {
  return inverse_transform_padded(f, f.grid().nt(), f.grid().nx());
}

PlateField forward_transform_plate(const Samples& s, const TorusGrid& grid, bool real) {
  if (s.nt != grid.nt() || s.nx != grid.nx() || s.nodes != 1 || s.components != 1)
    throw Error(ErrorKind::shape, "plate sample counts do not match the grid");
  return forward_transform_plate_padded(s, grid, real);
}

Samples inverse_transform_plate(const PlateField& f) {
  return inverse_transform_plate_padded(f, f.grid().nt(), f.grid().nx());
}

Samples inverse_transform_padded(const SpectralField& f, int mt, int mx) {
  const TorusGrid& g = f.grid();
  Samples s(mt, mx, g.nodes(), f.components());
  s.values = synth_lattice(f.coeffs(), g.nt(), g.nx(), static_cast<Eigen::Index>(g.nodes()) * f.components(), mt, mx);
  return s;
}

Samples inverse_transform_plate_padded(const PlateField& f, int mt, int mx) {
  const TorusGrid& g = f.grid();
  Samples s(mt, mx, 1, 1);
  s.values = synth_lattice(f.coeffs(), g.nt(), g.nx(), 1, mt, mx);
  return s;
}

SpectralField forward_transform_padded(const Samples& s, const TorusGrid& grid, bool real) {
  if (s.nodes != grid.nodes() || (s.components != 1 && s.components != 3))
    throw Error(ErrorKind::shape, "sample node/component counts do not match the grid");
  if (s.values.size() != static_cast<Eigen::Index>(s.nt) * s.nx * s.nx * s.nodes * s.components)
    throw Error(ErrorKind::shape, "sample buffer size mismatch");
  SpectralField f(grid, s.components, real);
  f.coeffs() = analyze_lattice(s.values, s.nt, s.nx, static_cast<Eigen::Index>(s.nodes) * s.components, grid.nt(), grid.nx());
  return f;
}

PlateField forward_transform_plate_padded(const Samples& s, const TorusGrid& grid, bool real) {
  if (s.nodes != 1 || s.components != 1) throw Error(ErrorKind::shape, "plate samples must be scalar with one node");
  if (s.values.size() != static_cast<Eigen::Index>(s.nt) * s.nx * s.nx)
    throw Error(ErrorKind::shape, "sample buffer size mismatch");
  PlateField f(grid, real);
  f.coeffs() = analyze_lattice(s.values, s.nt, s.nx, 1, grid.nt(), grid.nx());
  return f;
}

Samples sample_function(const TorusGrid& grid, int components,
                        const std::function<void(double, double, double, double, cplx*)>& fn) {
  Samples s(grid.nt(), grid.nx(), grid.nodes(), components);
  for (int it = 0; it < grid.nt(); ++it)
    for (int i1 = 0; i1 < grid.nx(); ++i1)
      for (int i2 = 0; i2 < grid.nx(); ++i2)
        for (int j = 0; j < grid.nodes(); ++j)
          fn(grid.t_sample(it), grid.x_sample(i1), grid.x_sample(i2), grid.x3()(j), &s(it, i1, i2, j, 0));
  return s;
}

Samples sample_plate_function(const TorusGrid& grid, const std::function<cplx(double, double, double)>& fn) {
  Samples s(grid.nt(), grid.nx(), 1, 1);
  for (int it = 0; it < grid.nt(); ++it)
    for (int i1 = 0; i1 < grid.nx(); ++i1)
      for (int i2 = 0; i2 < grid.nx(); ++i2) s(it, i1, i2) = fn(grid.t_sample(it), grid.x_sample(i1), grid.x_sample(i2));
  return s;
}

// ---------------------------------------------------------------- projections, traces

SpectralField project_steady(const SpectralField& f) {
  SpectralField out(f.grid(), f.components(), f.is_real());
  const TorusGrid& g = f.grid();
  const Eigen::Index block = static_cast<Eigen::Index>(g.nodes()) * f.components();
  const Eigen::Index begin = static_cast<Eigen::Index>(g.mode_offset(0, -g.kx_max(), -g.kx_max())) * block;
  const Eigen::Index len = static_cast<Eigen::Index>(g.nx()) * g.nx() * block;
  out.coeffs().segment(begin, len) = f.coeffs().segment(begin, len);
  return out;
}

SpectralField project_oscillatory(const SpectralField& f) { return f - project_steady(f); }

PlateField project_steady(const PlateField& f) {
  PlateField out(f.grid(), f.is_real());
  const TorusGrid& g = f.grid();
  for (int m1 = -g.kx_max(); m1 <= g.kx_max(); ++m1)
    for (int m2 = -g.kx_max(); m2 <= g.kx_max(); ++m2) out(0, m1, m2) = f(0, m1, m2);
  return out;
}

PlateField project_oscillatory(const PlateField& f) { return f - project_steady(f); }

PlateField trace_bottom(const SpectralField& f, int component) {
  PlateField out(f.grid(), f.is_real());
  for (std::size_t o = 0; o < f.grid().mode_count(); ++o) {
    const ModeIndex m = f.grid().mode_at(o);
    out.coeffs()(o) = f(m.k, m.m1, m.m2, 0, component);
  }
  return out;
}

PlateField trace_top(const SpectralField& f, int component) {
  PlateField out(f.grid(), f.is_real());
  const int top = f.grid().nz();
  for (std::size_t o = 0; o < f.grid().mode_count(); ++o) {
    const ModeIndex m = f.grid().mode_at(o);
    out.coeffs()(o) = f(m.k, m.m1, m.m2, top, component);
  }
  return out;
}

SpectralField divergence(const SpectralField& u) {
  if (u.components() != 3) throw Error(ErrorKind::shape, "divergence needs a 3-component field");
  const TorusGrid& g = u.grid();
  SpectralField out(g, 1, u.is_real());
  const Eigen::MatrixXd& d = g.cheb().d1;
  for (std::size_t o = 0; o < g.mode_count(); ++o) {
    const ModeIndex m = g.mode_at(o);
    Eigen::VectorXcd v = I * g.wavenumber(m.m1) * u.profile(m, 0) + I * g.wavenumber(m.m2) * u.profile(m, 1);
    v += d * u.profile(m, 2);
    out.set_profile(m, 0, v);
  }
  return out;
}

}  // namespace plateflow
