#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include "heatcloak/io.hpp"

namespace heatcloak {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap64(v);
  return v;
}

std::string num(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& data) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::random_device rd;
  fs::path tmp = path;
  tmp += ".tmp" + std::to_string(rd());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename to '" + path.string() + "': " + ec.message());
  }
}

std::string encode_field_grid(const FieldGrid& g) {
  if (g.values.size() != g.cell_count()) throw std::invalid_argument("encode_field_grid: value count mismatch");
  std::string out = "heatfield 1 " + std::to_string(g.nx) + " " + std::to_string(g.ny) + " " + num(g.origin.x) + " " +
                    num(g.origin.y) + " " + num(g.dx) + " " + num(g.dy) + " " + num(g.time) + " " +
                    num(g.diffusivity) + "\n";
  const size_t head = out.size();
  out.resize(head + 8 * g.values.size());
  for (size_t i = 0; i < g.values.size(); ++i) {
    const std::uint64_t bits = to_little(std::bit_cast<std::uint64_t>(g.values[i]));
    std::memcpy(&out[head + 8 * i], &bits, 8);
  }
  return out;
}

FieldGrid decode_field_grid(const std::string& bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw std::runtime_error("field file: missing header line");
  std::istringstream hs(bytes.substr(0, nl));
  std::string magic;
  int version = 0;
  FieldGrid g;
  std::string tok[6];
  hs >> magic >> version >> g.nx >> g.ny;
  for (auto& t : tok) hs >> t;
  if (magic != "heatfield") throw std::runtime_error("field file: bad magic '" + magic + "'");
  if (version != 1) throw std::runtime_error("field file: unsupported version " + std::to_string(version));
  if (!hs || g.nx < 0 || g.ny < 0) throw std::runtime_error("field file: malformed header");
  std::string rest;
  if (hs >> rest) throw std::runtime_error("field file: trailing header fields");
  double* dst[6] = {&g.origin.x, &g.origin.y, &g.dx, &g.dy, &g.time, &g.diffusivity};
  for (int i = 0; i < 6; ++i) {
    const auto [end, ec] = std::from_chars(tok[i].data(), tok[i].data() + tok[i].size(), *dst[i]);
    if (ec != std::errc() || end != tok[i].data() + tok[i].size()) throw std::runtime_error("field file: bad header number");
  }
  const size_t n = g.cell_count();
  const size_t payload = bytes.size() - nl - 1;
  if (payload < 8 * n) throw std::runtime_error("field file: truncated payload");
  if (payload > 8 * n) throw std::runtime_error("field file: payload longer than header says");
  g.values.resize(n);
  for (size_t i = 0; i < n; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, &bytes[nl + 1 + 8 * i], 8);
    g.values[i] = std::bit_cast<double>(to_little(bits));
  }
  return g;
}

void write_field_grid(const FieldGrid& grid, const std::filesystem::path& path) {
  write_file_atomic(path, encode_field_grid(grid));
}

FieldGrid read_field_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open field file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return decode_field_grid(ss.str());
}

FieldGrid log10_abs(const FieldGrid& grid) {
  FieldGrid out = grid;
  for (double& v : out.values) v = std::isnan(v) ? v : std::log10(std::abs(v));
  return out;
}

std::string metrics_csv(const MetricTable& table) {
  std::ostringstream os;
  for (size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
  os << "\n";
  os.precision(17);
  for (const auto& row : table.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) os << ",";
      if (!std::isnan(row[i])) os << row[i];
    }
    os << "\n";
  }
  return os.str();
}

void write_metrics_csv(const MetricTable& table, const std::filesystem::path& path) {
  write_file_atomic(path, metrics_csv(table));
}

void write_metadata(const std::map<std::string, std::string>& metadata, const std::filesystem::path& path) {
  std::string s;
  for (const auto& [k, v] : metadata) s += k + " = " + v + "\n";
  write_file_atomic(path, s);
}

void write_result(const ScenarioResult& result, const ScenarioConfig& cfg, const std::filesystem::path& dir) {
  write_metrics_csv(result.metrics, dir / "metrics.csv");
  auto md = result.metadata;
  for (size_t i = 0; i < result.warnings.size(); ++i) md["warning." + std::to_string(i)] = result.warnings[i];
  write_metadata(md, dir / "metadata.txt");
  write_file_atomic(dir / "config.txt", serialize_config(cfg));
  for (const auto& [name, frames] : result.fields) {
    const bool error_field = name.rfind("error", 0) == 0 || name == "mismatch";
    for (size_t p = 0; p < frames.size(); ++p) {
      const std::string stem = name + "_" + std::to_string(p < result.steps.size() ? result.steps[p] : static_cast<int>(p));
      if (cfg.write_fields) write_field_grid(frames[p], dir / "fields" / (stem + ".heatfield"));
      if (cfg.heatmaps) {
        if (error_field) {
          render_heatmap(log10_abs(frames[p]), ColorRange{cfg.log_lo, cfg.log_hi}, dir / "images" / (stem + "_log10.png"));
        } else {
          render_heatmap(frames[p], std::nullopt, dir / "images" / (stem + ".png"));
        }
      }
    }
  }
}

}  // namespace heatcloak
