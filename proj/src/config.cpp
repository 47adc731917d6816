#include "inls/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace inls {

namespace {

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"problem", {"N", "b"}},
      {"grid", {"L", "M"}},
      {"init", {"kind", "amplitude", "width", "center", "amplitude2", "width2", "center2", "checkpoint"}},
      {"solver",
       {"dt0", "dt_floor", "t_max", "safety", "gradnorm_ceiling", "supnorm_ceiling", "sample_stride",
        "checkpoint_stride", "c_cfl", "mass_drift_limit"}},
      {"cutoff", {"k", "R"}},
      {"emit", {"csv", "svg", "checkpoints", "out_dir"}},
  };
  return keys;
}

struct Entry {
  std::string value;
  int line = 0;
};

/// Typed access to the parsed entries; conversion failures are collected.
class Reader {
 public:
  Reader(std::map<std::string, std::map<std::string, Entry>> entries, std::vector<std::string>& problems)
      : entries_(std::move(entries)), problems_(problems) {}

  bool has(const std::string& section, const std::string& key) const {
    auto s = entries_.find(section);
    return s != entries_.end() && s->second.count(key);
  }
  bool has_section(const std::string& section) const { return entries_.count(section) > 0; }

  template <typename T>
  void get(const std::string& section, const std::string& key, T& target) {
    if (!has(section, key)) return;
    const Entry& e = entries_.at(section).at(key);
    if (!convert(e.value, target)) {
      problems_.push_back(where(section, key, e) + ": cannot parse '" + e.value + "'");
    }
  }

  void get_list(const std::string& section, const std::string& key, std::vector<double>& target) {
    if (!has(section, key)) return;
    const Entry& e = entries_.at(section).at(key);
    target.clear();
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      double v = 0.0;
      if (!convert(trim(item), v)) {
        problems_.push_back(where(section, key, e) + ": cannot parse '" + e.value + "'");
        target.clear();
        return;
      }
      target.push_back(v);
    }
  }

 private:
  static std::string where(const std::string& section, const std::string& key, const Entry& e) {
    return "line " + std::to_string(e.line) + ": " + section + "." + key;
  }

  static bool convert(const std::string& text, double& out) {
    const auto r = std::from_chars(text.data(), text.data() + text.size(), out);
    return r.ec == std::errc() && r.ptr == text.data() + text.size();
  }
  template <typename I>
    requires std::is_integral_v<I>
  static bool convert(const std::string& text, I& out) {
    const auto r = std::from_chars(text.data(), text.data() + text.size(), out);
    return r.ec == std::errc() && r.ptr == text.data() + text.size();
  }
  static bool convert(const std::string& text, bool& out) {
    if (text == "true" || text == "yes" || text == "1") {
      out = true;
    } else if (text == "false" || text == "no" || text == "0") {
      out = false;
    } else {
      return false;
    }
    return true;
  }
  static bool convert(const std::string& text, std::string& out) {
    out = text;
    return !text.empty();
  }

  std::map<std::string, std::map<std::string, Entry>> entries_;
  std::vector<std::string>& problems_;
};

std::array<double, 3> to_center(const std::vector<double>& v, int dim, const char* key,
                                std::vector<std::string>& problems) {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  if (v.empty()) return c;
  if (static_cast<int>(v.size()) != dim) {
    problems.push_back(std::string("init.") + key + " needs " + std::to_string(dim) + " components");
    return c;
  }
  std::copy(v.begin(), v.end(), c.begin());
  return c;
}

std::string format_double(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : ConstraintError("invalid configuration: " + join(problems, "; ")), problems_(std::move(problems)) {}

std::vector<CutoffProfile> ExperimentConfig::profiles() const {
  std::vector<CutoffProfile> out;
  for (const CutoffChoice& c : cutoffs) out.push_back(build_cutoff(c.k, c.radius, params));
  return out;
}

ExperimentConfig parse_config(const std::string& text) {
  std::vector<std::string> problems;
  std::map<std::string, std::map<std::string, Entry>> entries;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const std::string at = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') {
        problems.push_back(at + "malformed section header '" + line + "'");
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!schema().count(section)) problems.push_back(at + "unknown section [" + section + "]");
      entries[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      problems.push_back(at + "expected key = value, got '" + line + "'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      problems.push_back(at + "key '" + key + "' outside any section");
      continue;
    }
    const auto known = schema().find(section);
    if (known == schema().end()) continue;
    if (!known->second.count(key)) {
      problems.push_back(at + "unknown key " + section + "." + key);
      continue;
    }
    if (entries[section].count(key)) {
      problems.push_back(at + "duplicate key " + section + "." + key);
      continue;
    }
    entries[section][key] = {value, line_no};
  }

  Reader r(std::move(entries), problems);
  ExperimentConfig cfg;

  int dim = 0;
  double b = 0.0;
  if (!r.has("problem", "N")) problems.push_back("problem.N is required");
  if (!r.has("problem", "b")) problems.push_back("problem.b is required");
  r.get("problem", "N", dim);
  r.get("problem", "b", b);
  bool params_ok = false;
  if (r.has("problem", "N") && r.has("problem", "b")) {
    try {
      cfg.params = ProblemParams(dim, b);
      params_ok = true;
    } catch (const ConstraintError& e) {
      problems.push_back(e.what());
    }
  }

  double half_width = 0.0;
  long points = 0;
  if (!r.has("grid", "L")) problems.push_back("grid.L is required");
  if (!r.has("grid", "M")) problems.push_back("grid.M is required");
  r.get("grid", "L", half_width);
  r.get("grid", "M", points);
  bool grid_ok = false;
  if (params_ok && r.has("grid", "L") && r.has("grid", "M")) {
    try {
      cfg.grid = Grid(dim, half_width, points);
      grid_ok = true;
    } catch (const ConstraintError& e) {
      problems.push_back(e.what());
    }
  }

  std::string kind = "gaussian";
  r.get("init", "kind", kind);
  try {
    cfg.init.kind = initial_kind_from_string(kind);
  } catch (const ConstraintError& e) {
    problems.push_back(e.what());
  }
  r.get("init", "amplitude", cfg.init.bump.amplitude);
  r.get("init", "width", cfg.init.bump.width);
  r.get("init", "amplitude2", cfg.init.second.amplitude);
  r.get("init", "width2", cfg.init.second.width);
  r.get("init", "checkpoint", cfg.init.checkpoint_path);
  std::vector<double> center, center2;
  r.get_list("init", "center", center);
  r.get_list("init", "center2", center2);
  if (params_ok) {
    cfg.init.bump.center = to_center(center, dim, "center", problems);
    cfg.init.second.center = to_center(center2, dim, "center2", problems);
  }
  if (!(cfg.init.bump.width > 0.0) || !(cfg.init.second.width > 0.0)) {
    problems.push_back("init widths must be positive");
  }
  if (cfg.init.kind == InitialKind::from_checkpoint && cfg.init.checkpoint_path.empty()) {
    problems.push_back("init.kind = from_checkpoint requires init.checkpoint");
  }

  SolverConfig& s = cfg.solver;
  r.get("solver", "dt0", s.dt0);
  r.get("solver", "dt_floor", s.dt_floor);
  r.get("solver", "t_max", s.t_max);
  r.get("solver", "safety", s.safety);
  r.get("solver", "gradnorm_ceiling", s.gradnorm_ceiling);
  r.get("solver", "supnorm_ceiling", s.supnorm_ceiling);
  r.get("solver", "sample_stride", s.sample_stride);
  if (r.has("solver", "checkpoint_stride")) {
    int stride = 0;
    r.get("solver", "checkpoint_stride", stride);
    s.checkpoint_stride = stride;
  }
  r.get("solver", "c_cfl", s.c_cfl);
  r.get("solver", "mass_drift_limit", s.mass_drift_limit);
  for (auto& v : s.violations()) problems.push_back(std::move(v));

  int k = 0;
  r.get("cutoff", "k", k);
  std::vector<double> radii;
  r.get_list("cutoff", "R", radii);
  if (!r.has("cutoff", "R") && grid_ok) {
    const double l = cfg.grid.half_width();
    radii = {l / 8.0, l / 4.0, l / 2.0};
  }
  if (params_ok) {
    if (!r.has("cutoff", "k")) {
      k = default_k(cfg.params);
    } else {
      for (auto& v : k_violations(k, cfg.params)) problems.push_back("cutoff.k: " + v);
    }
  }
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) problems.push_back("cutoff.R values must be positive");
    if (i > 0 && !(radii[i] > radii[i - 1])) problems.push_back("cutoff.R values must be strictly ascending");
    if (grid_ok && !(2.0 * radii[i] <= cfg.grid.half_width())) {
      problems.push_back("cutoff.R=" + format_double(radii[i]) + " violates 2R <= grid.L (weight must be flat at the box edge)");
    }
  }
  for (double radius : radii) cfg.cutoffs.push_back({k, radius});

  r.get("emit", "csv", cfg.emit.csv);
  r.get("emit", "svg", cfg.emit.svg);
  r.get("emit", "checkpoints", cfg.emit.checkpoints);
  r.get("emit", "out_dir", cfg.out_dir);
  if (cfg.emit.checkpoints && !s.checkpoint_stride) {
    problems.push_back("emit.checkpoints = true requires solver.checkpoint_stride");
  }

  // Keep messages unique but in first-seen order.
  std::vector<std::string> unique;
  for (auto& p : problems) {
    if (std::find(unique.begin(), unique.end(), p) == unique.end()) unique.push_back(std::move(p));
  }
  if (!unique.empty()) throw ConfigError(std::move(unique));
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string render_config(const ExperimentConfig& cfg) {
  const int dim = cfg.params.dim();
  auto list = [](const double* v, int n) {
    std::vector<std::string> parts;
    for (int i = 0; i < n; ++i) parts.push_back(format_double(v[i]));
    return join(parts, ", ");
  };
  std::ostringstream os;
  os << "[problem]\nN = " << dim << "\nb = " << format_double(cfg.params.b()) << "\n\n";
  os << "[grid]\nL = " << format_double(cfg.grid.half_width()) << "\nM = " << cfg.grid.points() << "\n\n";
  os << "[init]\nkind = " << to_string(cfg.init.kind) << "\namplitude = " << format_double(cfg.init.bump.amplitude)
     << "\nwidth = " << format_double(cfg.init.bump.width) << "\ncenter = " << list(cfg.init.bump.center.data(), dim)
     << "\namplitude2 = " << format_double(cfg.init.second.amplitude)
     << "\nwidth2 = " << format_double(cfg.init.second.width)
     << "\ncenter2 = " << list(cfg.init.second.center.data(), dim) << "\n";
  if (!cfg.init.checkpoint_path.empty()) os << "checkpoint = " << cfg.init.checkpoint_path << "\n";
  const SolverConfig& s = cfg.solver;
  os << "\n[solver]\ndt0 = " << format_double(s.dt0) << "\ndt_floor = " << format_double(s.dt_floor)
     << "\nt_max = " << format_double(s.t_max) << "\nsafety = " << format_double(s.safety)
     << "\ngradnorm_ceiling = " << format_double(s.gradnorm_ceiling)
     << "\nsupnorm_ceiling = " << format_double(s.supnorm_ceiling) << "\nsample_stride = " << s.sample_stride
     << "\n";
  if (s.checkpoint_stride) os << "checkpoint_stride = " << *s.checkpoint_stride << "\n";
  os << "c_cfl = " << format_double(s.c_cfl) << "\nmass_drift_limit = " << format_double(s.mass_drift_limit) << "\n";
  if (!cfg.cutoffs.empty()) {
    std::vector<double> radii;
    for (const auto& c : cfg.cutoffs) radii.push_back(c.radius);
    os << "\n[cutoff]\nk = " << cfg.cutoffs.front().k << "\nR = " << list(radii.data(), static_cast<int>(radii.size()))
       << "\n";
  }
  os << "\n[emit]\ncsv = " << (cfg.emit.csv ? "true" : "false") << "\nsvg = " << (cfg.emit.svg ? "true" : "false")
     << "\ncheckpoints = " << (cfg.emit.checkpoints ? "true" : "false") << "\nout_dir = " << cfg.out_dir << "\n";
  return os.str();
}

}  // namespace inls
