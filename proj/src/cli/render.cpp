#include "opcorrect/cli/render.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

namespace opcorrect::cli {

Raster rasterize(const Vector& values, int nx, int ny) {
  require(nx >= 1 && ny >= 1, "render: mesh size must be positive");
  require(values.size() == static_cast<Eigen::Index>(nx + 1) * (ny + 1),
          "render: field length does not match a " + std::to_string(nx) + "x" + std::to_string(ny) + " mesh");
  require(values.allFinite(), "render: field has nonfinite values");
  Raster r;
  r.width = nx + 1;
  r.height = ny + 1;
  r.min = values.minCoeff();
  r.max = values.maxCoeff();
  r.degenerate = !(r.max > r.min);
  r.pixels.resize(static_cast<std::size_t>(r.width) * static_cast<std::size_t>(r.height));
  for (int row = 0; row < r.height; ++row) {
    const int j = ny - row;
    for (int i = 0; i <= nx; ++i) {
      const double v = values[j * (nx + 1) + i];
      const double level = r.degenerate ? 128.0 : std::round(255.0 * (v - r.min) / (r.max - r.min));
      r.pixels[static_cast<std::size_t>(row * r.width + i)] = static_cast<std::uint8_t>(level);
    }
  }
  return r;
}

Raster render_field(const Vector& values, int nx, int ny, const std::filesystem::path& path) {
  Raster r = rasterize(values, nx, ny);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "P5\n" << r.width << ' ' << r.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(r.pixels.data()), static_cast<std::streamsize>(r.pixels.size()));
  if (!out) throw Error("write failed for " + path.string());

  std::ofstream side(path.string() + ".txt");
  if (!side) throw Error("cannot write sidecar for " + path.string());
  side << std::setprecision(17) << "min " << r.min << "\nmax " << r.max << "\ndegenerate " << (r.degenerate ? 1 : 0)
       << '\n';
  return r;
}

Raster read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string magic;
  int maxval = 0;
  Raster r;
  in >> magic >> r.width >> r.height >> maxval;
  if (!in || magic != "P5" || maxval != 255 || r.width < 1 || r.height < 1) throw Error("not an 8-bit P5 file");
  in.get();
  r.pixels.resize(static_cast<std::size_t>(r.width) * static_cast<std::size_t>(r.height));
  in.read(reinterpret_cast<char*>(r.pixels.data()), static_cast<std::streamsize>(r.pixels.size()));
  if (!in) throw Error("truncated PGM " + path.string());
  return r;
}

} // namespace opcorrect::cli
