#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

#include "heatcloak/io.hpp"

namespace heatcloak {

namespace {

using Rgb = std::array<unsigned char, 3>;

// blue -> teal -> green -> yellow
constexpr std::array<std::array<double, 3>, 5> kPalette{{
    {0.267, 0.005, 0.329},
    {0.230, 0.322, 0.546},
    {0.128, 0.567, 0.551},
    {0.369, 0.789, 0.383},
    {0.993, 0.906, 0.144},
}};
constexpr Rgb kNanColor{255, 0, 255};

Rgb color_at(double s) {
  s = std::clamp(s, 0.0, 1.0) * (kPalette.size() - 1);
  const size_t i = std::min(static_cast<size_t>(s), kPalette.size() - 2);
  const double f = s - static_cast<double>(i);
  Rgb c;
  for (int k = 0; k < 3; ++k) {
    const double v = (1.0 - f) * kPalette[i][k] + f * kPalette[i + 1][k];
    c[k] = static_cast<unsigned char>(std::lround(255.0 * v));
  }
  return c;
}

void write_png(const std::filesystem::path& path, int w, int h, const std::vector<unsigned char>& rgb) {
  std::filesystem::create_directories(path.has_parent_path() ? path.parent_path() : ".");
  std::random_device rd;
  std::filesystem::path tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  FILE* fp = std::fopen(tmp.c_str(), "wb");
  if (!fp) throw std::runtime_error("cannot write '" + tmp.string() + "'");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    std::filesystem::remove(tmp);
    throw std::runtime_error("libpng failed writing '" + path.string() + "'");
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < h; ++y) png_write_row(png, const_cast<png_bytep>(&rgb[static_cast<size_t>(y) * w * 3]));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fclose(fp) != 0) throw std::runtime_error("cannot close '" + tmp.string() + "'");
  std::filesystem::rename(tmp, path);
}

}  // namespace

HeatmapInfo render_heatmap(const FieldGrid& grid, const std::optional<ColorRange>& range,
                           const std::filesystem::path& path) {
  if (grid.nx <= 0 || grid.ny <= 0 || grid.values.size() != grid.cell_count()) {
    throw std::invalid_argument("render_heatmap: empty or inconsistent grid");
  }
  HeatmapInfo info;
  if (range) {
    if (!(std::isfinite(range->lo) && std::isfinite(range->hi)) || range->lo > range->hi) {
      throw std::invalid_argument("render_heatmap: range must be finite with lo <= hi");
    }
    info.range = *range;
  } else {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : grid.values)
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    if (!std::isfinite(lo)) lo = hi = 0.0;
    info.range = {lo, hi};
  }
  info.degenerate = info.range.lo == info.range.hi;
  const double span = info.range.hi - info.range.lo;
  std::vector<unsigned char> rgb(grid.cell_count() * 3);
  for (int row = 0; row < grid.ny; ++row) {
    const int iy = grid.ny - 1 - row;
    for (int ix = 0; ix < grid.nx; ++ix) {
      const double v = grid.at(ix, iy);
      Rgb c;
      if (std::isnan(v)) c = kNanColor;
      else if (info.degenerate) c = color_at(0.5);
      else c = color_at((v - info.range.lo) / span);  // +-inf clamp to the ends
      std::copy(c.begin(), c.end(), rgb.begin() + (static_cast<size_t>(row) * grid.nx + ix) * 3);
    }
  }
  write_png(path, grid.nx, grid.ny, rgb);
  std::ostringstream side;
  side.precision(17);
  side << "min " << info.range.lo << "\nmax " << info.range.hi << "\n";
  if (info.degenerate) side << "warning degenerate range, solid image\n";
  std::filesystem::path sp = path;
  sp += ".range.txt";
  write_file_atomic(sp, side.str());
  return info;
}

}  // namespace heatcloak
