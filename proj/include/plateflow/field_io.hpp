#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>

#include "plateflow/spectral_field.hpp"

namespace plateflow {

// Binary container: magic "PLFSPEC1", little-endian u32 (N_t, N_x, N_z, components,
// real flag), then (re, im) doubles in (k, xi1, xi2, node, component) order.
// Plate fields are stored with N_z = 0 (a single node).
struct ContainerHeader {
  std::uint32_t nt = 0, nx = 0, nz = 0, components = 0, real = 0;
};

void write_field(const std::string& path, const SpectralField& f);
void write_plate(const std::string& path, const PlateField& f);
ContainerHeader read_header(const std::string& path);
SpectralField read_field(const std::string& path, const TorusGrid& grid);
PlateField read_plate(const std::string& path, const TorusGrid& grid);

nlohmann::json to_json(const SpectralField& f);
nlohmann::json to_json(const PlateField& f);
SpectralField field_from_json(const nlohmann::json& j, const TorusGrid& grid);
PlateField plate_from_json(const nlohmann::json& j, const TorusGrid& grid);

}  // namespace plateflow
