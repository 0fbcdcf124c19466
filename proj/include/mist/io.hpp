#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mist/diffops.hpp"
#include "mist/field.hpp"

namespace mist {

// Two interchange formats, both little-endian float32 payloads:
//
//  raw  - three ASCII header lines (width, height, pitch in meters),
//         then row-major top-down pixels.
//  pfm  - grayscale portable float map: "Pf", dimensions, negative scale
//         marker; scanlines stored bottom-up per convention and normalized
//         to top-down in memory on load. Carries no pitch (defaults to
//         1.0 m unless overridden).
//
// Values are exchanged at 32-bit precision; computation is 64-bit.

enum class FieldFormat { pfm, raw };

struct FieldFile {
  FieldFormat format = FieldFormat::raw;
  std::filesystem::path path;
};

/// Infers the format from the file extension (.pfm / .raw).
FieldFormat format_from_extension(const std::filesystem::path& path);

/// Throws format_error (with a byte offset where known) on malformed
/// headers, truncated payloads, or non-finite values.
ScalarField read_field(const FieldFile& file,
                       std::optional<double> pitch_override = std::nullopt);

void write_field(const ScalarField& field, const FieldFile& file);

StencilKind parse_stencil_kind(const std::string& text);
BoundaryRule parse_boundary(const std::string& text);
std::string to_string(StencilKind kind);
std::string to_string(BoundaryRule boundary);

/// A reconstruction run parsed from a `key = value` text file.
/// Keys: delta_m, energy_ev, pitch_m, output_dir (mandatory);
/// scheme, boundary, epsilon (optional); pair = <reference> <sample>
/// (repeatable, order preserved; all other keys may appear once).
/// Unknown or duplicated keys and missing input files are errors; paths
/// are resolved relative to the config file's directory.
struct RunConfig {
  double delta_m = 0.0;
  double energy_ev = 0.0;
  double pitch_m = 0.0;
  StencilScheme scheme = StencilScheme::fd_mirror();
  double epsilon = 1e-6;
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> pairs;
  std::filesystem::path output_dir;
};

RunConfig read_run_config(const std::filesystem::path& path);

}  // namespace mist
