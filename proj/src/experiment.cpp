#include "inls/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "inls/checkpoint.hpp"
#include "inls/svg_plot.hpp"

namespace inls {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// FNV-1a; used to name runs by their configuration, not by the clock.
std::string fingerprint(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json solver_json(const SolverConfig& s) {
  json j{{"dt0", s.dt0},
         {"dt_floor", s.dt_floor},
         {"t_max", s.t_max},
         {"safety", s.safety},
         {"gradnorm_ceiling", s.gradnorm_ceiling},
         {"supnorm_ceiling", s.supnorm_ceiling},
         {"sample_stride", s.sample_stride},
         {"c_cfl", s.c_cfl},
         {"mass_drift_limit", s.mass_drift_limit}};
  j["checkpoint_stride"] = s.checkpoint_stride ? json(*s.checkpoint_stride) : json(nullptr);
  return j;
}

json alpha_json(const AlphaSummary& a) {
  return {{"mean", finite_or_null(a.mean)},
          {"min", finite_or_null(a.min)},
          {"max", finite_or_null(a.max)},
          {"rel_spread", finite_or_null(a.rel_spread)},
          {"samples", a.samples}};
}

std::string csv_name(std::size_t index) { return "series_p" + std::to_string(index) + ".csv"; }

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw IoError("CSV lacks column " + name);
    return static_cast<std::size_t>(it - header.begin());
  }
};

Table read_csv(const fs::path& path) {
  std::istringstream in(read_text(path));
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + " is empty");
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream rs(line);
    for (std::string cell; std::getline(rs, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != t.header.size()) throw IoError(path.string() + ": ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

double rel_diff(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return 0.0;
  if (a == b) return 0.0;
  const double scale = std::max(std::abs(a), std::abs(b));
  return std::abs(a - b) / scale;
}

json load_manifest(const fs::path& run_dir) {
  const fs::path path = run_dir / "manifest.json";
  if (!fs::exists(path)) throw IoError("no manifest.json in " + run_dir.string());
  try {
    return json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw IoError("manifest.json is not valid JSON: " + std::string(e.what()));
  }
}

}  // namespace

int exit_code(Outcome outcome) {
  switch (outcome) {
    case Outcome::reached_t_max: return kExitReachedTMax;
    case Outcome::blowup_detected: return kExitBlowup;
    case Outcome::instability_detected: return kExitInstability;
  }
  return kExitFailure;
}

AlphaSummary summarize_alpha(const RunReport& report) {
  AlphaSummary a;
  double sum = 0.0;
  a.min = std::numeric_limits<double>::infinity();
  a.max = -std::numeric_limits<double>::infinity();
  for (const Sample& s : report.series) {
    for (const VirialReport& v : s.virial) {
      if (!std::isfinite(v.alpha_check)) continue;
      sum += v.alpha_check;
      a.min = std::min(a.min, v.alpha_check);
      a.max = std::max(a.max, v.alpha_check);
      ++a.samples;
    }
  }
  if (a.samples == 0) {
    a.mean = a.min = a.max = a.rel_spread = std::numeric_limits<double>::quiet_NaN();
    return a;
  }
  a.mean = sum / static_cast<double>(a.samples);
  a.rel_spread = (a.max - a.min) / std::abs(a.mean);
  return a;
}

std::string series_csv(const RunReport& report, std::size_t index) {
  std::string out;
  const auto& cols = series_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
  out += "\n";
  for (const Sample& s : report.series) {
    const VirialReport& v = s.virial.at(index);
    const double cells[] = {s.t,
                            s.dt,
                            s.conservation.mass,
                            s.conservation.energy,
                            s.grad_norm,
                            s.sup_norm,
                            v.z,
                            v.z_prime,
                            v.z_second_formula,
                            s.z_second_fd.at(index),
                            v.K1,
                            v.K2,
                            v.K3,
                            v.alpha_check};
    for (std::size_t i = 0; i < std::size(cells); ++i) out += (i ? "," : "") + fmt(cells[i]);
    out += "\n";
  }
  return out;
}

SimulationResult simulate(const ExperimentConfig& cfg) {
  const fs::path dir = cfg.out_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  const std::string config_text = render_config(cfg);
  const std::string run_id = fingerprint(config_text);
  json files = json::array();
  write_text(dir / "config.ini", config_text);
  files.push_back({{"path", "config.ini"}, {"kind", "config"}});

  const std::vector<CutoffProfile> profiles = cfg.profiles();
  RunHooks hooks;
  std::vector<std::string> checkpoints;
  if (cfg.emit.checkpoints) {
    fs::create_directories(dir / "checkpoints", ec);
    if (ec) throw IoError("cannot create checkpoint directory: " + ec.message());
    hooks.on_checkpoint = [&](const Field& u, const Sample& s) {
      char name[40];
      std::snprintf(name, sizeof name, "ckpt_%010ld.bin", s.step);
      const std::string rel = std::string("checkpoints/") + name;
      write_checkpoint((dir / rel).string(), u, {s.t, s.step, run_id});
      checkpoints.push_back(rel);
    };
  }

  SimulationResult result;
  result.report = run(cfg.init, cfg.params, cfg.grid, cfg.solver, profiles, hooks);
  const RunReport& r = result.report;
  result.alpha = summarize_alpha(r);
  result.exit_status = exit_code(r.outcome);

  json profile_list = json::array();
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    profile_list.push_back({{"index", i}, {"k", profiles[i].k()}, {"R", profiles[i].radius()}, {"csv", csv_name(i)}});
    if (cfg.emit.csv) {
      write_text(dir / csv_name(i), series_csv(r, i));
      files.push_back({{"path", csv_name(i)}, {"kind", "series_csv"}});
    }
  }
  for (const std::string& c : checkpoints) {
    files.push_back({{"path", c}, {"kind", "checkpoint"}});
    files.push_back({{"path", c + ".json"}, {"kind", "checkpoint_sidecar"}});
  }

  json manifest{
      {"format", "inls-run"},
      {"version", 1},
      {"run_id", run_id},
      {"params", {{"N", cfg.params.dim()}, {"b", cfg.params.b()}}},
      {"grid", {{"N", cfg.grid.dim()}, {"L", cfg.grid.half_width()}, {"M", cfg.grid.points()}}},
      {"init",
       {{"kind", to_string(cfg.init.kind)},
        {"amplitude", cfg.init.bump.amplitude},
        {"width", cfg.init.bump.width},
        {"center", std::vector<double>(cfg.init.bump.center.begin(), cfg.init.bump.center.begin() + cfg.params.dim())}}},
      {"cfg", {{"solver", solver_json(cfg.solver)}, {"profiles", profile_list}}},
      {"outcome", to_string(r.outcome)},
      {"detail", r.detail},
      {"t_end", r.t_end},
      {"steps", r.steps},
      {"E0", r.initial_energy},
      {"M0", r.initial_mass},
      {"grad_norm0", r.initial_grad_norm},
      {"min_dt", r.min_dt},
      {"detectors",
       {{"gradnorm_ceiling_hit", r.gradnorm_ceiling_hit},
        {"supnorm_ceiling_hit", r.supnorm_ceiling_hit},
        {"dt_floor_hit", r.dt_floor_hit}}},
      {"alpha_summary", alpha_json(result.alpha)},
      {"files", files}};
  manifest["blowup_time_bracket"] =
      r.blowup_time_bracket ? json::array({r.blowup_time_bracket->first, r.blowup_time_bracket->second}) : json(nullptr);
  result.manifest = dir / "manifest.json";
  write_text(result.manifest, manifest.dump(2) + "\n");

  if (cfg.emit.svg && cfg.emit.csv) plot(dir);
  return result;
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  for (auto a : {SweepAxis::amplitude, SweepAxis::R, SweepAxis::b, SweepAxis::k}) {
    if (to_string(a) == name) return a;
  }
  throw ConstraintError("unknown sweep axis '" + name + "' (expected amplitude|R|b|k)");
}

std::string to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::amplitude: return "amplitude";
    case SweepAxis::R: return "R";
    case SweepAxis::b: return "b";
    case SweepAxis::k: return "k";
  }
  return "unknown";
}

std::vector<SweepRow> sweep(const ExperimentConfig& cfg, SweepAxis axis, const std::vector<double>& values,
                            int workers) {
  if (values.empty()) throw ConstraintError("sweep needs at least one value");
  if (workers < 1) throw ConstraintError("sweep needs at least one worker");
  const fs::path dir = cfg.out_dir;
  fs::create_directories(dir);

  std::vector<SweepRow> rows(values.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++) {
      SweepRow& row = rows[i];
      row.value = values[i];
      try {
        ExperimentConfig c = cfg;
        c.out_dir = (dir / (to_string(axis) + "_" + std::to_string(i))).string();
        switch (axis) {
          case SweepAxis::amplitude:
            c.init.bump.amplitude = values[i];
            break;
          case SweepAxis::R:
            c.cutoffs = {{cfg.cutoffs.empty() ? default_k(cfg.params) : cfg.cutoffs.front().k, values[i]}};
            break;
          case SweepAxis::b:
            c.params = ProblemParams(cfg.params.dim(), values[i]);
            for (auto& cut : c.cutoffs) cut.k = default_k(c.params);
            break;
          case SweepAxis::k:
            if (values[i] != std::round(values[i])) throw ConstraintError("k values must be integers");
            for (auto& cut : c.cutoffs) cut.k = static_cast<int>(values[i]);
            break;
        }
        const SimulationResult res = simulate(c);
        row.outcome = to_string(res.report.outcome);
        row.t_end = res.report.t_end;
        row.E0 = res.report.initial_energy;
        row.alpha = res.alpha;
        row.exit_status = res.exit_status;
      } catch (const ConstraintError& e) {
        row.outcome = "config_error";
        row.error = e.what();
        row.exit_status = kExitConfigError;
      } catch (const std::exception& e) {
        row.outcome = "error";
        row.error = e.what();
        row.exit_status = kExitFailure;
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(workers, static_cast<int>(values.size()));
  for (int w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::string csv = "axis,value,outcome,t_end,E0,alpha_mean,alpha_min,alpha_max,exit_status,error\n";
  for (const SweepRow& row : rows) {
    std::string err = row.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    csv += to_string(axis) + "," + fmt(row.value) + "," + row.outcome + "," + fmt(row.t_end) + "," + fmt(row.E0) +
           "," + fmt(row.alpha.mean) + "," + fmt(row.alpha.min) + "," + fmt(row.alpha.max) + "," +
           std::to_string(row.exit_status) + "," + err + "\n";
  }
  write_text(dir / "summary.csv", csv);
  return rows;
}

std::vector<fs::path> plot(const fs::path& run_dir) {
  if (!fs::is_directory(run_dir)) throw IoError(run_dir.string() + " is not a directory");
  json manifest = load_manifest(run_dir);
  const auto problems = validate_manifest(manifest, run_dir);
  if (!problems.empty()) throw IoError("invalid manifest: " + problems.front());

  std::vector<std::pair<double, Table>> tables;
  for (const json& p : manifest["cfg"]["profiles"]) {
    const fs::path csv = run_dir / p["csv"].get<std::string>();
    if (!fs::exists(csv)) throw IoError("missing " + csv.string());
    tables.emplace_back(p["R"].get<double>(), read_csv(csv));
  }
  if (tables.empty() || tables.front().second.rows.empty()) throw IoError("no time series to plot in " + run_dir.string());

  const Table& base = tables.front().second;
  auto column = [](const Table& t, const std::string& name) {
    const std::size_t c = t.column(name);
    std::vector<double> out;
    for (const auto& row : t.rows) out.push_back(row[c]);
    return out;
  };
  const std::vector<double> t = column(base, "t");
  const std::vector<double> mass = column(base, "mass");
  const std::vector<double> energy = column(base, "energy");
  std::vector<double> dmass, denergy;
  for (std::size_t i = 0; i < t.size(); ++i) {
    dmass.push_back((mass[i] - mass[0]) / std::abs(mass[0]));
    denergy.push_back((energy[i] - energy[0]) / std::max(std::abs(energy[0]), 1e-300));
  }

  PlotSpec conservation{"Conservation drift", "t", "relative drift", false, {}};
  conservation.series.push_back({"mass", t, dmass});
  conservation.series.push_back({"energy", t, denergy});

  PlotSpec virial{"Localized virial z_R and z_R''", "t", "value", false, {}};
  for (const auto& [radius, table] : tables) {
    char label[64];
    std::snprintf(label, sizeof label, "z_R, R=%g", radius);
    virial.series.push_back({label, column(table, "t"), column(table, "zR")});
    std::snprintf(label, sizeof label, "z_R'' (formula), R=%g", radius);
    virial.series.push_back({label, column(table, "t"), column(table, "zR_second_formula")});
  }

  PlotSpec grad{"Gradient norm", "t", "||grad u||_2", true, {}};
  grad.series.push_back({"grad_norm", t, column(base, "grad_norm")});

  // Render everything before touching the disk so a failure leaves no partial output.
  const std::vector<std::pair<std::string, std::string>> rendered{
      {"conservation.svg", render_svg(conservation)},
      {"virial.svg", render_svg(virial)},
      {"gradnorm.svg", render_svg(grad)}};

  std::vector<fs::path> written;
  for (const auto& [name, svg] : rendered) {
    write_text(run_dir / name, svg);
    written.push_back(run_dir / name);
    bool listed = false;
    for (const json& f : manifest["files"]) listed = listed || f["path"] == name;
    if (!listed) manifest["files"].push_back({{"path", name}, {"kind", "plot"}});
  }
  write_text(run_dir / "manifest.json", manifest.dump(2) + "\n");
  return written;
}

std::vector<std::string> validate_manifest(const json& m, const fs::path& run_dir) {
  std::vector<std::string> out;
  if (!m.is_object()) return {"manifest must be a JSON object"};
  auto need = [&](const json& obj, const std::string& key, auto pred, const char* what) {
    if (!obj.contains(key)) {
      out.push_back("missing field " + key);
      return false;
    }
    if (!pred(obj[key])) {
      out.push_back("field " + key + " must be " + what);
      return false;
    }
    return true;
  };
  auto is_num = [](const json& j) { return j.is_number(); };
  auto is_num_or_null = [](const json& j) { return j.is_number() || j.is_null(); };
  auto is_int = [](const json& j) { return j.is_number_integer(); };
  auto is_obj = [](const json& j) { return j.is_object(); };
  auto is_str = [](const json& j) { return j.is_string(); };

  need(m, "format", [](const json& j) { return j == "inls-run"; }, "\"inls-run\"");
  need(m, "version", is_int, "an integer");
  need(m, "run_id", is_str, "a string");
  if (need(m, "params", is_obj, "an object")) {
    need(m["params"], "N", is_int, "an integer");
    need(m["params"], "b", is_num, "a number");
  }
  if (need(m, "grid", is_obj, "an object")) {
    need(m["grid"], "N", is_int, "an integer");
    need(m["grid"], "L", is_num, "a number");
    need(m["grid"], "M", is_int, "an integer");
  }
  if (need(m, "cfg", is_obj, "an object")) {
    need(m["cfg"], "solver", is_obj, "an object");
    if (need(m["cfg"], "profiles", [](const json& j) { return j.is_array(); }, "an array")) {
      for (const json& p : m["cfg"]["profiles"]) {
        if (!p.is_object() || !p.contains("k") || !p.contains("R") || !p.contains("csv")) {
          out.push_back("cfg.profiles entries need k, R and csv");
        }
      }
    }
  }
  need(
      m, "outcome",
      [](const json& j) {
        return j == "reached_t_max" || j == "blowup_detected" || j == "instability_detected";
      },
      "one of reached_t_max|blowup_detected|instability_detected");
  need(m, "t_end", is_num, "a number");
  need(m, "E0", is_num, "a number");
  need(m, "M0", is_num, "a number");
  if (need(m, "alpha_summary", is_obj, "an object")) {
    for (const char* key : {"mean", "min", "max", "rel_spread"}) need(m["alpha_summary"], key, is_num_or_null, "a number or null");
  }
  if (need(m, "files", [](const json& j) { return j.is_array(); }, "an array")) {
    for (const json& f : m["files"]) {
      if (!f.is_object() || !f.contains("path") || !f["path"].is_string() || !f.contains("kind")) {
        out.push_back("files entries need path and kind");
        continue;
      }
      if (!fs::exists(run_dir / f["path"].get<std::string>())) {
        out.push_back("listed file " + f["path"].get<std::string>() + " does not exist");
      }
    }
  }
  return out;
}

json AuditReport::to_json() const {
  return {{"checkpoints", checkpoints},
          {"rows_checked", rows_checked},
          {"max_rel_error", max_rel_error},
          {"worst", worst},
          {"pass", pass}};
}

AuditReport virial_audit(const fs::path& run_dir, double tolerance) {
  const json manifest = load_manifest(run_dir);
  const auto problems = validate_manifest(manifest, run_dir);
  if (!problems.empty()) throw IoError("invalid manifest: " + problems.front());

  const ProblemParams params(manifest["params"]["N"].get<int>(), manifest["params"]["b"].get<double>());
  std::vector<CutoffProfile> profiles;
  std::vector<Table> tables;
  for (const json& p : manifest["cfg"]["profiles"]) {
    profiles.push_back(build_cutoff(p["k"].get<int>(), p["R"].get<double>(), params));
    tables.push_back(read_csv(run_dir / p["csv"].get<std::string>()));
  }

  AuditReport report;
  std::optional<SpectralPlan> plan;
  for (const json& f : manifest["files"]) {
    if (f["kind"] != "checkpoint") continue;
    const Checkpoint ck = read_checkpoint((run_dir / f["path"].get<std::string>()).string());
    if (!(ck.field.params() == params)) throw GridMismatch("checkpoint parameters differ from the manifest");
    if (!plan || !(plan->grid() == ck.field.grid())) plan.emplace(ck.field.grid());
    ++report.checkpoints;
    const double t = ck.sidecar.at("t").get<double>();
    const FieldDiagnostics diag(*plan, ck.field);
    const ConservationReport cons = diag.conservation();
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      const Table& table = tables[i];
      const std::size_t tc = table.column("t");
      const auto row = std::find_if(table.rows.begin(), table.rows.end(), [&](const auto& r) { return r[tc] == t; });
      if (row == table.rows.end()) {
        throw IoError("no CSV row at t=" + fmt(t) + " for " + f["path"].get<std::string>());
      }
      const VirialReport v = diag.virial(profiles[i]);
      const std::pair<const char*, double> recomputed[] = {
          {"mass", cons.mass},     {"energy", cons.energy},     {"grad_norm", diag.grad_norm()},
          {"sup_norm", diag.sup_norm()}, {"zR", v.z},          {"zR_prime", v.z_prime},
          {"zR_second_formula", v.z_second_formula}, {"K1", v.K1}, {"K2", v.K2},
          {"K3", v.K3},            {"alpha_check", v.alpha_check}};
      for (const auto& [name, value] : recomputed) {
        const double err = rel_diff(value, (*row)[table.column(name)]);
        if (err > report.max_rel_error || std::isnan(err)) {
          report.max_rel_error = std::isnan(err) ? std::numeric_limits<double>::infinity() : err;
          report.worst = std::string(name) + " at t=" + fmt(t) + " (profile " + std::to_string(i) + ")";
        }
      }
      ++report.rows_checked;
    }
  }
  report.pass = report.checkpoints > 0 && report.max_rel_error <= tolerance;
  return report;
}

json cutoff_verify_report(int dim, double b, int k, double radius, int samples, double c) {
  const ProblemParams params(dim, b);
  if (samples < 10) throw ConstraintError("samples must be at least 10");
  const auto violations = k_violations(k, params);
  const CutoffProfile profile = build_cutoff_unchecked(k, radius, params);

  json out{{"N", dim}, {"b", b}, {"k", k}, {"R", radius}, {"samples", samples}, {"c", c},
           {"k_violations", violations}};
  const PhicondReport phicond = verify_phicond(profile, samples);
  out["phicond_min"] = phicond.min_value;
  out["phicond_argmin"] = phicond.argmin;
  out["grad_weight_bound"] = grad_weight_bound(profile, samples);
  out["weight_exponent"] = weight_exponent(params);

  json pass{{"k_valid", violations.empty()}, {"phicond", phicond.pass}};
  try {
    const EpsilonReport eps = find_epsilon(profile, c, samples);
    out["epsilon"] = eps.epsilon;
    out["sup_ratio"] = eps.sup_ratio;
    out["argsup_over_R"] = eps.argsup;
    out["max_excess"] = eps.max_excess;
    out["epsilon_R_spread"] = eps.r_spread;
    pass["epsilon_positive"] = eps.epsilon > 0.0;
    pass["phivare"] = eps.inequality_holds;
    pass["epsilon_R_independent"] = eps.r_independent;
  } catch (const UnboundedRatioError& e) {
    out["epsilon"] = nullptr;
    out["sup_ratio"] = nullptr;
    out["epsilon_error"] = e.what();
    pass["epsilon_positive"] = false;
    pass["phivare"] = false;
    pass["epsilon_R_independent"] = false;
  }
  bool all = true;
  for (const auto& [key, value] : pass.items()) all = all && value.get<bool>();
  pass["all"] = all;
  out["pass"] = pass;
  return out;
}

IneqCase default_case(Inequality which, int dim, double b) {
  IneqCase c;
  c.which = which;
  c.params = ProblemParams(dim, b);
  switch (dim) {
    case 1: c.grid = Grid(1, 20.0, 1024); break;
    case 2: c.grid = Grid(2, 12.0, 128); break;
    default: c.grid = Grid(3, 12.0, 48); break;
  }
  if (which == Inequality::gn) {
    c.weight.kind = WeightKind::plateau;
    c.weight.height = 1.0;
  } else {
    c.weight.kind = WeightKind::cutoff_phi2;
    c.weight.radius = 1.0;
  }
  return c;
}

json interp_check_report(Inequality which, int dim, double b, int trials, std::uint64_t seed) {
  const IneqCase c = default_case(which, dim, b);
  const auto v = c.violations();
  if (!v.empty()) throw ConstraintError(v.front());
  const ConstantEstimate est = estimate_constant(c, trials, seed);
  json hist = json::array();
  for (const HistogramBin& bin : est.histogram) hist.push_back({{"log10_lower", bin.log10_lower}, {"count", bin.count}});
  return {{"which", to_string(which)},
          {"N", dim},
          {"b", b},
          {"trials", trials},
          {"seed", seed},
          {"grid", {{"L", c.grid.half_width()}, {"M", c.grid.points()}}},
          {"weight", to_string(c.weight.kind)},
          {"c_hat", est.c_hat},
          {"c_hat_note", "empirical: max LHS/RHS over the sampled family, not a proven constant"},
          {"argmax_descriptor", est.argmax_descriptor},
          {"ratio_histogram", hist},
          {"evaluations", est.evaluations}};
}

}  // namespace inls
