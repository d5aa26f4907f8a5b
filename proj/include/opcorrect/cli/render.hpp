#pragma once

#include "opcorrect/common/types.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace opcorrect::cli {

struct Raster {
  int width = 0;
  int height = 0;
  /// Row-major, top row first.
  std::vector<std::uint8_t> pixels;
  double min = 0.0;
  double max = 0.0;
  bool degenerate = false;
};

/// Maps nodal values on an nx x ny structured mesh linearly onto [0, 255];
/// image row 0 is the top edge y = 1. A constant field maps to 128.
Raster rasterize(const Vector& values, int nx, int ny);

/// Writes binary PGM (P5) plus a "<path>.txt" sidecar with min, max and the
/// degenerate flag.
Raster render_field(const Vector& values, int nx, int ny, const std::filesystem::path& path);

Raster read_pgm(const std::filesystem::path& path);

} // namespace opcorrect::cli
