#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "heatcloak/geometry.hpp"
#include "heatcloak/scenarios.hpp"

namespace heatcloak {

/// Parses the bracketed-section key = value format into a validated config. Errors name the
/// line and key (ConfigError).
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);
/// Text that parses back to an equal config.
std::string serialize_config(const ScenarioConfig& cfg);
bool configs_equal(const ScenarioConfig& a, const ScenarioConfig& b);

/// "circle(cx, cy, r)", "kite(cx, cy, scale)", "flower(cx, cy, r0, amplitude, petals)".
Shape parse_shape(const std::string& text);
std::string format_shape(const Shape& shape);

/// Writes data to path through a temporary file in the same directory and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& data);

/// Header line "heatfield 1 nx ny x0 y0 dx dy t k" then nx*ny little-endian 64-bit floats,
/// row-major by y then x.
std::string encode_field_grid(const FieldGrid& grid);
FieldGrid decode_field_grid(const std::string& bytes);
void write_field_grid(const FieldGrid& grid, const std::filesystem::path& path);
FieldGrid read_field_grid(const std::filesystem::path& path);

/// log10 |v| per cell; zero cells map to -inf, NaN stays NaN.
FieldGrid log10_abs(const FieldGrid& grid);

struct ColorRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct HeatmapInfo {
  ColorRange range;
  bool degenerate = false;  // lo == hi: solid image
};

/// One pixel per cell (top row = largest y), linear map of the range onto a blue-to-yellow
/// palette, values clamped to the range, NaN cells in magenta. Without a range the finite
/// min/max is used. Writes a PNG and a sidecar "<path>.range.txt".
HeatmapInfo render_heatmap(const FieldGrid& grid, const std::optional<ColorRange>& range,
                           const std::filesystem::path& path);

/// CSV with a header row; values printed with 17 significant digits.
std::string metrics_csv(const MetricTable& table);
void write_metrics_csv(const MetricTable& table, const std::filesystem::path& path);

/// "key = value" lines.
void write_metadata(const std::map<std::string, std::string>& metadata, const std::filesystem::path& path);

/// Writes fields (when enabled), heatmaps, metrics.csv, metadata.txt and config.txt under dir.
void write_result(const ScenarioResult& result, const ScenarioConfig& cfg, const std::filesystem::path& dir);

}  // namespace heatcloak
