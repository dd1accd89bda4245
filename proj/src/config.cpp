#include "stackcap/config.hpp"

#include <algorithm>
#include <cctype>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "stackcap/io.hpp"

namespace stackcap::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

// Parser scratch state: collected issues plus which keys appeared.
struct ParseState {
  std::vector<std::string> issues;
  bool saw_L = false;
  bool saw_H = false;

  void issue(int line, const std::string& msg) {
    issues.push_back("line " + std::to_string(line) + ": " + msg);
  }
  void semantic(const std::string& msg) { issues.push_back(msg); }
};

bool parse_double(const std::string& v, double& out) {
  const char* s = v.c_str();
  char* end = nullptr;
  out = std::strtod(s, &end);
  return end != s && *end == '\0' && std::isfinite(out);
}

bool parse_int(const std::string& v, long long& out) {
  const char* s = v.c_str();
  char* end = nullptr;
  out = std::strtoll(s, &end, 10);
  return end != s && *end == '\0';
}

bool parse_double_list(const std::string& v, std::vector<double>& out) {
  out.clear();
  if (trim(v).empty()) return true;
  std::size_t pos = 0;
  while (pos <= v.size()) {
    const std::size_t comma = v.find(',', pos);
    const std::string item = trim(v.substr(pos, comma == std::string::npos ? comma : comma - pos));
    double d = 0.0;
    if (!parse_double(item, d)) return false;
    out.push_back(d);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return true;
}

struct KeyHandlers {
  ExperimentConfig& cfg;
  ParseState& st;

  void set_int(int line, const std::string& key, const std::string& val, int& field) {
    long long v = 0;
    if (!parse_int(val, v) || v < INT_MIN || v > INT_MAX)
      st.issue(line, "'" + key + "' expects an integer, got '" + val + "'");
    else
      field = static_cast<int>(v);
  }
  void set_size(int line, const std::string& key, const std::string& val, std::size_t& field) {
    long long v = 0;
    if (!parse_int(val, v) || v < 0)
      st.issue(line, "'" + key + "' expects a nonnegative integer, got '" + val + "'");
    else
      field = static_cast<std::size_t>(v);
  }
  void set_double(int line, const std::string& key, const std::string& val, double& field) {
    double v = 0.0;
    if (!parse_double(val, v))
      st.issue(line, "'" + key + "' expects a number, got '" + val + "'");
    else
      field = v;
  }
  void set_list(int line, const std::string& key, const std::string& val,
                std::vector<double>& field) {
    if (!parse_double_list(val, field))
      st.issue(line, "'" + key + "' expects a comma-separated number list, got '" + val + "'");
  }
};

const char* kModelNames[] = {"circuit", "pnp", "mae-compare", "timescale-sweep", "relaxation"};

}  // namespace

std::string model_name(Model m) { return kModelNames[static_cast<int>(m)]; }

ConfigError::ConfigError(std::vector<std::string> issues_in)
    : ParameterError("invalid configuration:\n  " + join(issues_in, "\n  ")),
      issues_(std::move(issues_in)) {}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  ParseState st;
  KeyHandlers h{cfg, st};

  std::string section;
  bool section_known = true;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string raw =
        text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
    ++line_no;

    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        st.issue(line_no, "unterminated section header '" + line + "'");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      static const char* known[] = {"experiment", "electrolyte", "geometry", "drive",
                                    "numerics",   "sweep",       "output"};
      section_known = std::find_if(std::begin(known), std::end(known), [&](const char* k) {
                        return section == k;
                      }) != std::end(known);
      if (!section_known) st.issue(line_no, "unknown section '[" + section + "]'");
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      st.issue(line_no, "expected 'key = value', got '" + line + "'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) {
      st.issue(line_no, "missing key before '='");
      continue;
    }
    if (section.empty()) {
      st.issue(line_no, "key '" + key + "' appears before any [section]");
      continue;
    }
    if (!section_known) continue;  // already reported the section once

    bool ok = true;
    if (section == "experiment") {
      if (key == "model") {
        const auto* it = std::find(std::begin(kModelNames), std::end(kModelNames), val);
        if (it == std::end(kModelNames))
          st.issue(line_no, "unknown model '" + val +
                                "' (expected circuit, pnp, mae-compare, timescale-sweep, or "
                                "relaxation)");
        else
          cfg.model = static_cast<Model>(it - std::begin(kModelNames));
      } else {
        ok = false;
      }
    } else if (section == "electrolyte") {
      if (key == "z_plus")
        h.set_int(line_no, key, val, cfg.z_plus);
      else if (key == "z_minus")
        h.set_int(line_no, key, val, cfg.z_minus);
      else
        ok = false;
    } else if (section == "geometry") {
      if (key == "n")
        h.set_int(line_no, key, val, cfg.n);
      else if (key == "L") {
        h.set_double(line_no, key, val, cfg.L);
        st.saw_L = true;
      } else if (key == "H") {
        h.set_double(line_no, key, val, cfg.H);
        st.saw_H = true;
      } else
        ok = false;
    } else if (section == "drive") {
      if (key == "V_plus")
        h.set_double(line_no, key, val, cfg.V_plus);
      else if (key == "V_minus")
        h.set_double(line_no, key, val, cfg.V_minus);
      else
        ok = false;
    } else if (section == "numerics") {
      if (key == "epsilon")
        h.set_double(line_no, key, val, cfg.epsilon);
      else if (key == "dt")
        h.set_double(line_no, key, val, cfg.dt);
      else if (key == "t_final")
        h.set_double(line_no, key, val, cfg.t_final);
      else if (key == "rtol")
        h.set_double(line_no, key, val, cfg.rtol);
      else if (key == "atol")
        h.set_double(line_no, key, val, cfg.atol);
      else if (key == "samples")
        h.set_size(line_no, key, val, cfg.samples);
      else if (key == "grid") {
        if (val != "refined" && val != "uniform")
          st.issue(line_no, "'grid' must be 'refined' or 'uniform', got '" + val + "'");
        else
          cfg.grid = val;
      } else if (key == "uniform_cells")
        h.set_size(line_no, key, val, cfg.uniform_cells);
      else if (key == "layer_dx")
        h.set_double(line_no, key, val, cfg.layer_dx);
      else if (key == "growth")
        h.set_double(line_no, key, val, cfg.growth);
      else if (key == "bulk_dx")
        h.set_double(line_no, key, val, cfg.bulk_dx);
      else if (key == "output_times")
        h.set_list(line_no, key, val, cfg.output_times);
      else
        ok = false;
    } else if (section == "sweep") {
      if (key == "n_min")
        h.set_int(line_no, key, val, cfg.n_min);
      else if (key == "n_max")
        h.set_int(line_no, key, val, cfg.n_max);
      else if (key == "H_values")
        h.set_list(line_no, key, val, cfg.H_values);
      else if (key == "threads")
        h.set_int(line_no, key, val, cfg.threads);
      else
        ok = false;
    } else if (section == "output") {
      if (key == "prefix")
        cfg.prefix = val;
      else
        ok = false;
    }
    if (!ok) st.issue(line_no, "unknown key '" + key + "' in section [" + section + "]");
  }

  // Geometry defaulting: L and H are linked by L + H = 1.
  if (st.saw_L && st.saw_H) {
    if (std::abs(cfg.L + cfg.H - 1.0) > 1e-12)
      st.semantic("geometry.L and geometry.H must satisfy L + H = 1 (got L = " +
                  io::format_double(cfg.L) + ", H = " + io::format_double(cfg.H) + ")");
  } else if (st.saw_L) {
    cfg.H = 1.0 - cfg.L;
  } else if (st.saw_H) {
    cfg.L = 1.0 - cfg.H;
  } else if (cfg.n != 1) {
    cfg.L = 0.5;
    cfg.H = 0.5;
  }

  // Semantic validation; every violation is reported.
  if (cfg.z_plus < 1)
    st.semantic("electrolyte.z_plus must be >= 1 (got " + std::to_string(cfg.z_plus) + ")");
  if (cfg.z_minus > -1)
    st.semantic("electrolyte.z_minus must be <= -1 (got " + std::to_string(cfg.z_minus) + ")");
  if (cfg.n < 1) st.semantic("geometry.n must be >= 1 (got " + std::to_string(cfg.n) + ")");
  if (!(cfg.L > 0.0) || cfg.L > 1.0)
    st.semantic("geometry.L must lie in (0, 1] (got " + io::format_double(cfg.L) + ")");
  if (cfg.n == 1 && cfg.H != 0.0)
    st.semantic("geometry.n = 1 requires geometry.H = 0 (got H = " + io::format_double(cfg.H) +
                "); a single stack per side has no electrode region");
  if (cfg.n >= 2 && !(cfg.H > 0.0))
    st.semantic("geometry.n >= 2 requires geometry.H > 0 (got H = " + io::format_double(cfg.H) +
                ")");
  if (!(cfg.epsilon > 0.0) || cfg.epsilon >= 1.0)
    st.semantic("numerics.epsilon must lie in (0, 1) (got " + io::format_double(cfg.epsilon) +
                ")");
  if (!(cfg.dt > 0.0)) st.semantic("numerics.dt must be positive");
  if (!(cfg.t_final >= cfg.dt)) st.semantic("numerics.t_final must be >= dt");
  if (!(cfg.rtol > 0.0)) st.semantic("numerics.rtol must be positive");
  if (!(cfg.atol > 0.0)) st.semantic("numerics.atol must be positive");
  if (cfg.samples < 2) st.semantic("numerics.samples must be >= 2");
  if (cfg.uniform_cells < 4) st.semantic("numerics.uniform_cells must be >= 4");
  if (!(cfg.layer_dx > 0.0)) st.semantic("numerics.layer_dx must be positive");
  if (!(cfg.growth >= 1.0)) st.semantic("numerics.growth must be >= 1");
  if (!(cfg.bulk_dx > 0.0)) st.semantic("numerics.bulk_dx must be positive");
  for (std::size_t i = 0; i < cfg.output_times.size(); ++i) {
    const double t = cfg.output_times[i];
    if (!(t >= 0.0) || t > cfg.t_final) {
      st.semantic("numerics.output_times must lie in [0, t_final]");
      break;
    }
    if (i > 0 && !(t > cfg.output_times[i - 1])) {
      st.semantic("numerics.output_times must be strictly increasing");
      break;
    }
  }
  if (cfg.model == Model::TimescaleSweep) {
    if (cfg.n_min < 2 || cfg.n_min > cfg.n_max || cfg.n_max > 200)
      st.semantic("sweep requires 2 <= n_min <= n_max <= 200 (got n_min = " +
                  std::to_string(cfg.n_min) + ", n_max = " + std::to_string(cfg.n_max) + ")");
    if (cfg.H_values.empty()) st.semantic("sweep.H_values must not be empty");
    for (double Hv : cfg.H_values) {
      if (!(Hv > 0.0) || Hv >= 1.0) {
        st.semantic("sweep.H_values entries must lie in (0, 1)");
        break;
      }
    }
  }
  if (cfg.threads < 1) st.semantic("sweep.threads must be >= 1");

  if (!st.issues.empty()) throw ConfigError(std::move(st.issues));
  return cfg;
}

std::string serialize(const ExperimentConfig& cfg) {
  std::string out;
  auto kv = [&out](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
  out += "[experiment]\n";
  kv("model", model_name(cfg.model));
  out += "\n[electrolyte]\n";
  kv("z_plus", std::to_string(cfg.z_plus));
  kv("z_minus", std::to_string(cfg.z_minus));
  out += "\n[geometry]\n";
  kv("n", std::to_string(cfg.n));
  kv("L", io::format_double(cfg.L));
  kv("H", io::format_double(cfg.H));
  out += "\n[drive]\n";
  kv("V_plus", io::format_double(cfg.V_plus));
  kv("V_minus", io::format_double(cfg.V_minus));
  out += "\n[numerics]\n";
  kv("epsilon", io::format_double(cfg.epsilon));
  kv("dt", io::format_double(cfg.dt));
  kv("t_final", io::format_double(cfg.t_final));
  kv("rtol", io::format_double(cfg.rtol));
  kv("atol", io::format_double(cfg.atol));
  kv("samples", std::to_string(cfg.samples));
  kv("grid", cfg.grid);
  kv("uniform_cells", std::to_string(cfg.uniform_cells));
  kv("layer_dx", io::format_double(cfg.layer_dx));
  kv("growth", io::format_double(cfg.growth));
  kv("bulk_dx", io::format_double(cfg.bulk_dx));
  if (!cfg.output_times.empty()) {
    std::vector<std::string> parts;
    parts.reserve(cfg.output_times.size());
    for (double t : cfg.output_times) parts.push_back(io::format_double(t));
    kv("output_times", join(parts, ", "));
  }
  out += "\n[sweep]\n";
  kv("n_min", std::to_string(cfg.n_min));
  kv("n_max", std::to_string(cfg.n_max));
  {
    std::vector<std::string> parts;
    parts.reserve(cfg.H_values.size());
    for (double v : cfg.H_values) parts.push_back(io::format_double(v));
    kv("H_values", join(parts, ", "));
  }
  kv("threads", std::to_string(cfg.threads));
  if (!cfg.prefix.empty()) {
    out += "\n[output]\n";
    kv("prefix", cfg.prefix);
  }
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  return io::hex64(io::fnv1a64(serialize(cfg)));
}

}  // namespace stackcap::cli
