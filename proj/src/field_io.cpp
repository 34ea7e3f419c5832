#include "plateflow/field_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>

#include "plateflow/errors.hpp"

namespace plateflow {

namespace {

constexpr std::array<char, 8> magic{'P', 'L', 'F', 'S', 'P', 'E', 'C', '1'};

template <typename T>
void put(std::ostream& os, T v) {
  std::array<char, sizeof(T)> bytes;
  std::memcpy(bytes.data(), &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  os.write(bytes.data(), sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  std::array<char, sizeof(T)> bytes;
  if (!is.read(bytes.data(), sizeof(T))) throw Error(ErrorKind::io, "truncated field container");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T v;
  std::memcpy(&v, bytes.data(), sizeof(T));
  return v;
}

void write_raw(const std::string& path, const ContainerHeader& h, const Eigen::VectorXcd& c) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::io, "cannot open " + path + " for writing");
  os.write(magic.data(), magic.size());
  put(os, h.nt);
  put(os, h.nx);
  put(os, h.nz);
  put(os, h.components);
  put(os, h.real);
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    put(os, c(i).real());
    put(os, c(i).imag());
  }
  if (!os) throw Error(ErrorKind::io, "write failed for " + path);
}

Eigen::VectorXcd read_raw(const std::string& path, ContainerHeader& h) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::io, "cannot open " + path);
  std::array<char, 8> m{};
  if (!is.read(m.data(), m.size()) || m != magic) throw Error(ErrorKind::io, path + ": not a PLFSPEC1 container");
  h.nt = get<std::uint32_t>(is);
  h.nx = get<std::uint32_t>(is);
  h.nz = get<std::uint32_t>(is);
  h.components = get<std::uint32_t>(is);
  h.real = get<std::uint32_t>(is);
  const Eigen::Index n = static_cast<Eigen::Index>(h.nt) * h.nx * h.nx * (h.nz + 1) * h.components;
  Eigen::VectorXcd c(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double re = get<double>(is);
    const double im = get<double>(is);
    c(i) = cplx(re, im);
  }
  return c;
}

}  // namespace

void write_field(const std::string& path, const SpectralField& f) {
  const TorusGrid& g = f.grid();
  write_raw(path,
            {static_cast<std::uint32_t>(g.nt()), static_cast<std::uint32_t>(g.nx()), static_cast<std::uint32_t>(g.nz()),
             static_cast<std::uint32_t>(f.components()), f.is_real() ? 1u : 0u},
            f.coeffs());
}

void write_plate(const std::string& path, const PlateField& f) {
  const TorusGrid& g = f.grid();
  write_raw(path, {static_cast<std::uint32_t>(g.nt()), static_cast<std::uint32_t>(g.nx()), 0u, 1u, f.is_real() ? 1u : 0u},
            f.coeffs());
}

ContainerHeader read_header(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error(ErrorKind::io, "cannot open " + path);
  std::array<char, 8> m{};
  if (!is.read(m.data(), m.size()) || m != magic) throw Error(ErrorKind::io, path + ": not a PLFSPEC1 container");
  ContainerHeader h;
  h.nt = get<std::uint32_t>(is);
  h.nx = get<std::uint32_t>(is);
  h.nz = get<std::uint32_t>(is);
  h.components = get<std::uint32_t>(is);
  h.real = get<std::uint32_t>(is);
  return h;
}

SpectralField read_field(const std::string& path, const TorusGrid& grid) {
  ContainerHeader h;
  Eigen::VectorXcd c = read_raw(path, h);
  if (static_cast<int>(h.nt) != grid.nt() || static_cast<int>(h.nx) != grid.nx() || static_cast<int>(h.nz) != grid.nz())
    throw Error(ErrorKind::shape, path + ": container shape does not match the configured grid");
  SpectralField f(grid, static_cast<int>(h.components), h.real != 0);
  f.coeffs() = std::move(c);
  return f;
}

PlateField read_plate(const std::string& path, const TorusGrid& grid) {
  ContainerHeader h;
  Eigen::VectorXcd c = read_raw(path, h);
  if (static_cast<int>(h.nt) != grid.nt() || static_cast<int>(h.nx) != grid.nx() || h.nz != 0 || h.components != 1)
    throw Error(ErrorKind::shape, path + ": container is not a plate field on the configured grid");
  PlateField f(grid, h.real != 0);
  f.coeffs() = std::move(c);
  return f;
}

namespace {

nlohmann::json coeff_arrays(const Eigen::VectorXcd& c) {
  std::vector<double> re(c.size()), im(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    re[i] = c(i).real();
    im[i] = c(i).imag();
  }
  return {{"re", re}, {"im", im}};
}

Eigen::VectorXcd coeffs_from(const nlohmann::json& j, Eigen::Index n) {
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.at("im").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(re.size()) != n || static_cast<Eigen::Index>(im.size()) != n)
    throw Error(ErrorKind::shape, "JSON field has the wrong number of coefficients");
  Eigen::VectorXcd c(n);
  for (Eigen::Index i = 0; i < n; ++i) c(i) = cplx(re[i], im[i]);
  return c;
}

}  // namespace

nlohmann::json to_json(const SpectralField& f) {
  const TorusGrid& g = f.grid();
  nlohmann::json j = {{"format", "PLFSPEC1"}, {"nt", g.nt()},       {"nx", g.nx()},
                      {"nz", g.nz()},         {"components", f.components()}, {"real", f.is_real()},
                      {"period_t", g.period_t()}, {"period_x", g.period_x()}};
  j.update(coeff_arrays(f.coeffs()));
  return j;
}

nlohmann::json to_json(const PlateField& f) {
  const TorusGrid& g = f.grid();
  nlohmann::json j = {{"format", "PLFSPEC1"}, {"nt", g.nt()}, {"nx", g.nx()}, {"nz", 0}, {"components", 1},
                      {"real", f.is_real()},  {"period_t", g.period_t()}, {"period_x", g.period_x()}};
  j.update(coeff_arrays(f.coeffs()));
  return j;
}

SpectralField field_from_json(const nlohmann::json& j, const TorusGrid& grid) {
  if (j.at("nt").get<int>() != grid.nt() || j.at("nx").get<int>() != grid.nx() || j.at("nz").get<int>() != grid.nz())
    throw Error(ErrorKind::shape, "JSON field shape does not match the grid");
  SpectralField f(grid, j.at("components").get<int>(), j.value("real", false));
  f.coeffs() = coeffs_from(j, f.coeffs().size());
  return f;
}

PlateField plate_from_json(const nlohmann::json& j, const TorusGrid& grid) {
  if (j.at("nt").get<int>() != grid.nt() || j.at("nx").get<int>() != grid.nx() || j.at("nz").get<int>() != 0)
    throw Error(ErrorKind::shape, "JSON plate field shape does not match the grid");
  PlateField f(grid, j.value("real", false));
  f.coeffs() = coeffs_from(j, f.coeffs().size());
  return f;
}

}  // namespace plateflow
