#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "heatcloak/error.hpp"
#include "heatcloak/io.hpp"

namespace heatcloak {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s) {
  const std::string t = trim(s);
  double v = 0.0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size()) throw std::invalid_argument("bad number '" + t + "'");
  return v;
}

long long to_integer(const std::string& s) {
  const std::string t = trim(s);
  long long v = 0;
  const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || end != t.data() + t.size()) throw std::invalid_argument("bad integer '" + t + "'");
  return v;
}

std::vector<double> to_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& p : split(s, ',')) out.push_back(to_double(p));
  return out;
}

Vec2 to_pair(const std::string& s) {
  const auto v = to_list(s);
  if (v.size() != 2) throw std::invalid_argument("expected 'x, y'");
  return {v[0], v[1]};
}

bool to_bool(const std::string& s) {
  const std::string t = trim(s);
  if (t == "true" || t == "yes" || t == "1") return true;
  if (t == "false" || t == "no" || t == "0") return false;
  throw std::invalid_argument("bad boolean '" + t + "'");
}

PointSource to_source(const std::string& s) {
  const auto v = to_list(s);
  if (v.size() != 2 && v.size() != 3) throw std::invalid_argument("expected 'x, y' or 'x, y, strength'");
  return {{v[0], v[1]}, v.size() == 3 ? v[2] : 1.0};
}

std::string num(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

std::string pair_str(Vec2 p) { return num(p.x) + ", " + num(p.y); }

std::string source_str(const PointSource& s) {
  return pair_str(s.location) + (s.strength == 1.0 ? "" : ", " + num(s.strength));
}

}  // namespace

Shape parse_shape(const std::string& text) {
  const std::string t = trim(text);
  const auto open = t.find('(');
  if (open == std::string::npos || t.back() != ')') throw std::invalid_argument("shape must look like name(args)");
  const std::string name = trim(t.substr(0, open));
  const auto args = to_list(t.substr(open + 1, t.size() - open - 2));
  Shape shape;
  if (name == "circle") {
    if (args.size() != 3) throw std::invalid_argument("circle needs (cx, cy, radius)");
    shape = Circle{{args[0], args[1]}, args[2]};
  } else if (name == "kite") {
    if (args.size() != 3) throw std::invalid_argument("kite needs (cx, cy, scale)");
    shape = Kite{{args[0], args[1]}, args[2]};
  } else if (name == "flower") {
    if (args.size() != 5) throw std::invalid_argument("flower needs (cx, cy, mean_radius, amplitude, petals)");
    if (args[4] != static_cast<int>(args[4])) throw std::invalid_argument("flower petals must be an integer");
    shape = Flower{{args[0], args[1]}, args[2], args[3], static_cast<int>(args[4])};
  } else {
    throw std::invalid_argument("unknown shape '" + name + "'");
  }
  validate_shape(shape);
  return shape;
}

std::string format_shape(const Shape& shape) { return describe(shape); }

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig cfg;
  cfg.sources.clear();
  std::map<std::string, int> seen;
  bool have_kind = false;
  std::optional<Vec2> lower, upper;

  using Handler = std::function<void(const std::string&)>;
  const std::map<std::string, Handler> handlers = {
      {"scenario.kind",
       [&](const std::string& v) {
         cfg.kind = scenario_kind_from_string(trim(v));
         have_kind = true;
       }},
      {"scenario.name", [&](const std::string& v) { cfg.name = trim(v); }},
      {"geometry.cloak", [&](const std::string& v) { cfg.cloak = parse_shape(v); }},
      {"geometry.object", [&](const std::string& v) { cfg.object = parse_shape(v); }},
      {"geometry.standin", [&](const std::string& v) { cfg.standin = parse_shape(v); }},
      {"geometry.boundary_points", [&](const std::string& v) { cfg.boundary_points = static_cast<int>(to_integer(v)); }},
      {"geometry.object_points", [&](const std::string& v) { cfg.object_points = static_cast<int>(to_integer(v)); }},
      {"sources.source", [&](const std::string& v) { cfg.sources.push_back(to_source(v)); }},
      {"sources.mimic", [&](const std::string& v) { cfg.mimic_sources.push_back(to_source(v)); }},
      {"physics.diffusivity", [&](const std::string& v) { cfg.k = to_double(v); }},
      {"time.final", [&](const std::string& v) { cfg.final_time = to_double(v); }},
      {"time.steps", [&](const std::string& v) { cfg.steps = static_cast<int>(to_integer(v)); }},
      {"time.report", [&](const std::string& v) { cfg.report_times = to_list(v); }},
      {"grid.lower", [&](const std::string& v) { lower = to_pair(v); }},
      {"grid.upper", [&](const std::string& v) { upper = to_pair(v); }},
      {"grid.cells",
       [&](const std::string& v) {
         const auto parts = split(v, ',');
         if (parts.size() != 2) throw std::invalid_argument("expected 'nx, ny'");
         cfg.grid.nx = static_cast<int>(to_integer(parts[0]));
         cfg.grid.ny = static_cast<int>(to_integer(parts[1]));
       }},
      {"numerics.buffer", [&](const std::string& v) { cfg.buffer = to_double(v); }},
      {"numerics.product_window", [&](const std::string& v) { cfg.product_window = to_double(v); }},
      {"numerics.exact_lags", [&](const std::string& v) { cfg.exact_lags = static_cast<int>(to_integer(v)); }},
      {"numerics.trace_offset", [&](const std::string& v) { cfg.trace_offset = to_double(v); }},
      {"noise.fraction", [&](const std::string& v) { cfg.noise.fraction = to_double(v); }},
      {"noise.seed",
       [&](const std::string& v) {
         const long long s = to_integer(v);
         if (s < 0) throw std::invalid_argument("seed must be >= 0");
         cfg.noise.seed = static_cast<std::uint64_t>(s);
       }},
      {"harmonic.polynomial", [&](const std::string& v) { cfg.polynomial = trim(v); }},
      {"harmonic.point", [&](const std::string& v) { cfg.sample_points.push_back(to_pair(v)); }},
      {"output.fields", [&](const std::string& v) { cfg.write_fields = to_bool(v); }},
      {"output.heatmaps", [&](const std::string& v) { cfg.heatmaps = to_bool(v); }},
      {"output.log_range",
       [&](const std::string& v) {
         const Vec2 r = to_pair(v);
         cfg.log_lo = r.x;
         cfg.log_hi = r.y;
       }},
  };
  const std::set<std::string> repeatable = {"sources.source", "sources.mimic", "harmonic.point"};

  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string l = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (l.empty()) continue;
    if (l.front() == '[') {
      if (l.back() != ']') throw ConfigError("malformed section header '" + l + "'", line);
      section = trim(l.substr(1, l.size() - 2));
      static const std::set<std::string> sections = {"scenario", "geometry", "sources", "physics", "time",
                                                     "grid",     "numerics", "noise",   "harmonic", "output", "chosen"};
      if (!sections.count(section)) throw ConfigError("unknown section '" + section + "'", line);
      continue;
    }
    const auto eq = l.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    if (section.empty()) throw ConfigError("key outside of a section", line);
    const std::string key = trim(l.substr(0, eq));
    const std::string value = trim(l.substr(eq + 1));
    const std::string full = section + "." + key;
    if (section == "chosen") {
      cfg.chosen[key] = value;
      continue;
    }
    auto h = handlers.find(full);
    if (h == handlers.end()) throw ConfigError("unknown key '" + key + "' in section [" + section + "]", line, full);
    if (seen.count(full) && !repeatable.count(full)) throw ConfigError("duplicate key '" + key + "'", line, full);
    seen.emplace(full, line);
    try {
      h->second(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string(e.what()) + " for key '" + key + "'", line, full);
    }
  }
  if (!have_kind) throw ConfigError("missing key 'kind' in section [scenario]", 0, "scenario.kind");
  if (lower) {
    cfg.grid.box.xmin = lower->x;
    cfg.grid.box.ymin = lower->y;
  }
  if (upper) {
    cfg.grid.box.xmax = upper->x;
    cfg.grid.box.ymax = upper->y;
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    auto it = seen.find(e.key());
    if (it != seen.end()) throw ConfigError(e.bare_message() + " (key '" + e.key() + "')", it->second, e.key());
    throw;
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
  std::ostringstream os;
  os << "[scenario]\nkind = " << to_string(cfg.kind) << "\nname = " << cfg.name << "\n\n";
  os << "[geometry]\ncloak = " << format_shape(cfg.cloak) << "\n";
  if (cfg.object) os << "object = " << format_shape(*cfg.object) << "\n";
  if (cfg.standin) os << "standin = " << format_shape(*cfg.standin) << "\n";
  os << "boundary_points = " << cfg.boundary_points << "\nobject_points = " << cfg.object_points << "\n\n";
  os << "[sources]\n";
  for (const auto& s : cfg.sources) os << "source = " << source_str(s) << "\n";
  for (const auto& s : cfg.mimic_sources) os << "mimic = " << source_str(s) << "\n";
  os << "\n[physics]\ndiffusivity = " << num(cfg.k) << "\n\n";
  os << "[time]\nfinal = " << num(cfg.final_time) << "\nsteps = " << cfg.steps << "\n";
  if (!cfg.report_times.empty()) {
    os << "report = ";
    for (size_t i = 0; i < cfg.report_times.size(); ++i) os << (i ? ", " : "") << num(cfg.report_times[i]);
    os << "\n";
  }
  os << "\n[grid]\nlower = " << pair_str({cfg.grid.box.xmin, cfg.grid.box.ymin})
     << "\nupper = " << pair_str({cfg.grid.box.xmax, cfg.grid.box.ymax}) << "\ncells = " << cfg.grid.nx << ", "
     << cfg.grid.ny << "\n\n";
  os << "[numerics]\nbuffer = " << num(cfg.buffer) << "\nproduct_window = " << num(cfg.product_window)
     << "\nexact_lags = " << cfg.exact_lags << "\ntrace_offset = " << num(cfg.trace_offset) << "\n\n";
  if (cfg.noise.fraction > 0.0 || cfg.noise.seed != 0) {
    os << "[noise]\nfraction = " << num(cfg.noise.fraction) << "\nseed = " << cfg.noise.seed << "\n\n";
  }
  if (cfg.kind == ScenarioKind::harmonic_identity || cfg.polynomial != "x" || !cfg.sample_points.empty()) {
    os << "[harmonic]\npolynomial = " << cfg.polynomial << "\n";
    for (const Vec2& p : cfg.sample_points) os << "point = " << pair_str(p) << "\n";
    os << "\n";
  }
  os << "[output]\nfields = " << (cfg.write_fields ? "true" : "false")
     << "\nheatmaps = " << (cfg.heatmaps ? "true" : "false") << "\nlog_range = " << num(cfg.log_lo) << ", "
     << num(cfg.log_hi) << "\n";
  if (!cfg.chosen.empty()) {
    os << "\n[chosen]\n";
    for (const auto& [k, v] : cfg.chosen) os << k << " = " << v << "\n";
  }
  return os.str();
}

bool configs_equal(const ScenarioConfig& a, const ScenarioConfig& b) { return serialize_config(a) == serialize_config(b); }

}  // namespace heatcloak
