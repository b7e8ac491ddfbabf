#ifndef STARK_SWEEP_HPP
#define STARK_SWEEP_HPP

// Parameter sweeps over (Delta/g, beta/g, nbar, gt), deterministic CSV output
// and the figure presets. All quantities are in units of the coupling g.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "effective_model.hpp"
#include "entanglement.hpp"
#include "two_atom_state.hpp"

namespace stark {

namespace fs = std::filesystem;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "STARK_OUTPUT_DIR";

inline std::string default_output_dir() {
  const char* env = std::getenv(kOutputDirEnv);
  return (env && *env) ? std::string(env) : std::string(".");
}

/// Shortest "%.Ng" form (N <= 17) that parses back to the same double.
/// Negative zero prints as 0.
inline std::string format_number(double v) {
  if (v == 0.0) v = 0.0;
  char buf[40];
  for (int digits = 15; digits <= 17; ++digits) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

/// Short label used in file names, e.g. -1 -> "m1", 0.1 -> "0.1".
inline std::string label_number(double v) {
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", std::abs(v));
  return (v < 0.0 ? "m" : "") + std::string(buf);
}

struct SweepConfig {
  std::vector<double> delta_over_g{0.0};
  std::vector<double> beta_over_g{0.0};
  std::vector<double> nbar{0.0};
  int n0 = 0;
  double gt_min = 0.0;
  double gt_max = 4.0;
  double gt_step = 0.005;
  double tail_tol = 1e-10;
  bool renormalize_thermal = false;
  std::string output_path;  ///< directory; empty means default_output_dir()
  int workers = 1;          ///< 0 selects the hardware concurrency

  static const std::set<std::string>& keys() {
    static const std::set<std::string> k{"delta_over_g", "beta_over_g", "nbar",     "n0",
                                         "gt_min",       "gt_max",      "gt_step",  "tail_tol",
                                         "renormalize_thermal",         "output_path", "workers"};
    return k;
  }

  void apply(const KeyValues& kv) {
    kv.reject_unknown(keys());
    kv.read("delta_over_g", delta_over_g);
    kv.read("beta_over_g", beta_over_g);
    kv.read("nbar", nbar);
    kv.read("n0", n0);
    kv.read("gt_min", gt_min);
    kv.read("gt_max", gt_max);
    kv.read("gt_step", gt_step);
    kv.read("tail_tol", tail_tol);
    kv.read("renormalize_thermal", renormalize_thermal);
    kv.read("output_path", output_path);
    kv.read("workers", workers);
  }

  void validate() const {
    auto finite = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    if (delta_over_g.empty() || !finite(delta_over_g)) throw ConfigError("delta_over_g: need finite values");
    if (beta_over_g.empty() || !finite(beta_over_g)) throw ConfigError("beta_over_g: need finite values");
    if (nbar.empty() || !finite(nbar) || *std::min_element(nbar.begin(), nbar.end()) < 0.0)
      throw ConfigError("nbar: need finite values >= 0");
    if (n0 < 0) throw ConfigError("n0: must be >= 0");
    if (!(gt_step > 0.0)) throw ConfigError("gt_step: must be > 0");
    if (!(gt_min >= 0.0)) throw ConfigError("gt_min: must be >= 0");
    if (!(gt_max > gt_min)) throw ConfigError("gt_max: must be > gt_min");
    if (!(tail_tol > 0.0 && tail_tol <= 1e-4)) throw ConfigError("tail_tol: must lie in (0, 1e-4]");
    if (workers < 0) throw ConfigError("workers: must be >= 0");
  }

  std::string resolved_output() const { return output_path.empty() ? default_output_dir() : output_path; }
};

/// Rabi-angle grid gt_min + k * gt_step, up to gt_max inclusive.
inline std::vector<double> gt_grid(double gt_min, double gt_max, double gt_step) {
  const auto count = static_cast<long>(std::floor((gt_max - gt_min) / gt_step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(count));
  for (long k = 0; k < count; ++k) out.push_back(gt_min + static_cast<double>(k) * gt_step);
  return out;
}

struct SeriesSpec {
  double delta_over_g = 0.0;
  double beta_over_g = 0.0;
  double nbar = 0.0;

  ModelParams params() const { return ModelParams::symmetric(1.0, delta_over_g, beta_over_g); }
};

struct SeriesPoint {
  double gt = 0.0;
  double concurrence = 0.0;
  double eof = 0.0;
};

struct SeriesResult {
  SeriesSpec spec;
  std::vector<SeriesPoint> points;
  bool thermal = false;
  PhotonIndex cutoff = 0;    ///< thermal Fock cutoff, or n0 for Fock input
  double tail_deficit = 0.0;
};

/// One sweep point at Rabi angle gt (g = 1).
inline SeriesPoint evaluate_point(const SeriesSpec& s, double gt, const ThermalField* field, int n0,
                                  bool renormalize) {
  const ModelParams p = s.params();
  const TwoAtomDensityMatrix rho =
      field ? joint_density_thermal(p, gt, *field, renormalize) : joint_density_fock(p, gt, n0);
  const EntanglementResult e = entanglement(rho);
  return SeriesPoint{gt, e.concurrence, e.eof};
}

/// Runs fn(k) for k in [0, count) on up to `workers` threads. Each index is
/// handled exactly once, so writes to per-index slots need no locking.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  std::size_t n = workers == 0 ? std::max(1u, std::thread::hardware_concurrency())
                               : static_cast<std::size_t>(std::max(1, workers));
  n = std::min(n, std::max<std::size_t>(count, 1));
  if (n <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(n);
  for (std::size_t w = 0; w < n; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < count; k += n) fn(k);
    });
  for (auto& t : pool) t.join();
}

inline std::vector<SeriesResult> compute_series(const std::vector<SeriesSpec>& specs, const SweepConfig& cfg) {
  cfg.validate();
  const std::vector<double> grid = gt_grid(cfg.gt_min, cfg.gt_max, cfg.gt_step);

  std::vector<SeriesResult> results(specs.size());
  std::vector<ThermalField> fields(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    SeriesResult& r = results[i];
    r.spec = specs[i];
    r.thermal = specs[i].nbar > 0.0;
    if (r.thermal) {
      fields[i] = thermal_weights(specs[i].nbar, cfg.tail_tol);
      r.cutoff = fields[i].cutoff;
      r.tail_deficit = fields[i].tail_deficit;
    } else {
      r.cutoff = cfg.n0;
    }
    r.points.resize(grid.size());
  }

  const std::size_t total = specs.size() * grid.size();
  parallel_for(total, cfg.workers, [&](std::size_t k) {
    const std::size_t s = k / grid.size(), j = k % grid.size();
    results[s].points[j] = evaluate_point(specs[s], grid[j], results[s].thermal ? &fields[s] : nullptr,
                                          cfg.n0, cfg.renormalize_thermal);
  });
  return results;
}

/// Every (delta, beta, nbar) combination, in config order.
inline std::vector<SeriesSpec> sweep_specs(const SweepConfig& cfg) {
  std::vector<SeriesSpec> out;
  for (double d : cfg.delta_over_g)
    for (double b : cfg.beta_over_g)
      for (double nb : cfg.nbar) out.push_back(SeriesSpec{d, b, nb});
  return out;
}

inline std::string series_filename(const SeriesSpec& s) {
  return "sweep_d" + label_number(s.delta_over_g) + "_b" + label_number(s.beta_over_g) + "_nbar" +
         label_number(s.nbar) + ".csv";
}

inline void write_series_csv(std::ostream& out, const SeriesResult& r, const SweepConfig& cfg) {
  out << "# stark-entangle " << kVersion << "\n"
      << "# units = g\n"
      << "# delta_over_g = " << format_number(r.spec.delta_over_g) << "\n"
      << "# beta_over_g = " << format_number(r.spec.beta_over_g) << "\n"
      << "# nbar = " << format_number(r.spec.nbar) << "\n"
      << "# field = " << (r.thermal ? "thermal" : "fock") << "\n";
  if (r.thermal) {
    out << "# tail_tol = " << format_number(cfg.tail_tol) << "\n"
        << "# thermal_cutoff = " << r.cutoff << "\n"
        << "# tail_deficit = " << format_number(r.tail_deficit) << "\n"
        << "# renormalize_thermal = " << (cfg.renormalize_thermal ? "true" : "false") << "\n";
  } else {
    out << "# n0 = " << cfg.n0 << "\n";
  }
  out << "# gt_min = " << format_number(cfg.gt_min) << "\n"
      << "# gt_max = " << format_number(cfg.gt_max) << "\n"
      << "# gt_step = " << format_number(cfg.gt_step) << "\n"
      << "gt,concurrence,eof\n";
  for (const SeriesPoint& p : r.points)
    out << format_number(p.gt) << ',' << format_number(p.concurrence) << ',' << format_number(p.eof) << '\n';
}

inline void write_series_csv(const fs::path& path, const SeriesResult& r, const SweepConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  write_series_csv(out, r, cfg);
  out.flush();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

inline fs::path ensure_directory(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir + "'");
  return fs::path(dir);
}

/// Writes one CSV per series and returns their paths in config order.
inline std::vector<fs::path> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const fs::path dir = ensure_directory(cfg.resolved_output());
  const std::vector<SeriesResult> results = compute_series(sweep_specs(cfg), cfg);
  std::vector<fs::path> paths;
  for (const SeriesResult& r : results) {
    paths.push_back(dir / series_filename(r.spec));
    write_series_csv(paths.back(), r, cfg);
  }
  return paths;
}

// ---------------------------------------------------------------------------
// Figure presets and the plot manifest consumed by the plotting tool.

struct PresetSeries {
  SeriesSpec spec;
  std::string label;
  std::string style;  ///< "solid" or "dotted"
};

struct FigurePreset {
  std::string name;
  std::vector<PresetSeries> series;
  std::vector<std::string> assumptions;
};

inline constexpr double kDefaultPresetNbar = 0.1;

inline std::string series_label(const SeriesSpec& s) {
  std::string l = "Delta/g=" + format_number(s.delta_over_g) + ", beta/g=" + format_number(s.beta_over_g);
  if (s.nbar > 0.0) l += ", <n>=" + format_number(s.nbar);
  return l;
}

inline FigurePreset figure_preset(const std::string& name, double fig6_nbar = kDefaultPresetNbar) {
  FigurePreset f;
  f.name = name;
  auto pair = [&](double d, double b, double nbar) {
    f.series.push_back({SeriesSpec{0.0, 0.0, nbar}, "", "solid"});
    f.series.push_back({SeriesSpec{d, b, nbar}, "", "dotted"});
  };
  if (name == "fig2") {
    pair(2.0, 2.0, 0.0);
  } else if (name == "fig3") {
    pair(-1.0, 1.0, 0.0);
  } else if (name == "fig4") {
    pair(2.0, 2.0, 0.1);
  } else if (name == "fig5") {
    pair(-1.0, 1.0, 0.1);
  } else if (name == "fig6") {
    if (!(fig6_nbar >= 0.0) || !std::isfinite(fig6_nbar)) throw ConfigError("fig6: nbar must be >= 0");
    f.series.push_back({SeriesSpec{-2.0, 2.0, fig6_nbar}, "", "solid"});
    f.assumptions.push_back("nbar=" + format_number(fig6_nbar) +
                            " assumed; same thermal occupation as fig4/fig5");
    f.assumptions.push_back("single solid series assumed");
  } else {
    throw ConfigError("unknown preset '" + name + "' (expected fig2..fig6)");
  }
  for (auto& s : f.series) s.label = series_label(s.spec);
  return f;
}

struct ManifestSeries {
  std::string csv;  ///< relative to the manifest's directory
  std::string label;
  std::string style;
  SeriesSpec spec;

  bool operator==(const ManifestSeries& o) const {
    return csv == o.csv && label == o.label && style == o.style &&
           spec.delta_over_g == o.spec.delta_over_g && spec.beta_over_g == o.spec.beta_over_g &&
           spec.nbar == o.spec.nbar;
  }
};

struct PlotManifest {
  std::string figure;
  std::string x_label = "gt";
  std::string y_label = "E_F";
  std::string image;
  std::vector<ManifestSeries> series;
  std::vector<std::string> assumptions;

  bool operator==(const PlotManifest& o) const {
    return figure == o.figure && x_label == o.x_label && y_label == o.y_label && image == o.image &&
           series == o.series && assumptions == o.assumptions;
  }
};

inline nlohmann::json to_json(const PlotManifest& m) {
  nlohmann::json j;
  j["format"] = "stark-plot-manifest/1";
  j["tool_version"] = kVersion;
  j["figure"] = m.figure;
  j["x_label"] = m.x_label;
  j["y_label"] = m.y_label;
  j["image"] = m.image;
  j["assumptions"] = m.assumptions;
  j["series"] = nlohmann::json::array();
  for (const auto& s : m.series)
    j["series"].push_back({{"csv", s.csv},
                           {"label", s.label},
                           {"style", s.style},
                           {"delta_over_g", s.spec.delta_over_g},
                           {"beta_over_g", s.spec.beta_over_g},
                           {"nbar", s.spec.nbar}});
  return j;
}

inline PlotManifest manifest_from_json(const nlohmann::json& j) {
  try {
    PlotManifest m;
    m.figure = j.at("figure").get<std::string>();
    m.x_label = j.at("x_label").get<std::string>();
    m.y_label = j.at("y_label").get<std::string>();
    m.image = j.at("image").get<std::string>();
    m.assumptions = j.at("assumptions").get<std::vector<std::string>>();
    for (const auto& s : j.at("series"))
      m.series.push_back({s.at("csv").get<std::string>(), s.at("label").get<std::string>(),
                          s.at("style").get<std::string>(),
                          SeriesSpec{s.at("delta_over_g").get<double>(), s.at("beta_over_g").get<double>(),
                                     s.at("nbar").get<double>()}});
    if (m.series.empty()) throw ConfigError("manifest has no series");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
}

struct PresetOutput {
  fs::path manifest;
  std::vector<fs::path> csvs;
};

inline PresetOutput run_preset(const std::string& name, const SweepConfig& base, double fig6_nbar = kDefaultPresetNbar) {
  const FigurePreset preset = figure_preset(name, fig6_nbar);
  base.validate();
  const fs::path dir = ensure_directory(base.resolved_output());

  std::vector<SeriesSpec> specs;
  for (const auto& s : preset.series) specs.push_back(s.spec);
  const std::vector<SeriesResult> results = compute_series(specs, base);

  PlotManifest m;
  m.figure = name;
  m.image = name + ".png";
  m.assumptions = preset.assumptions;
  PresetOutput out;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const std::string file = name + "_" + std::to_string(i) + "_" + preset.series[i].style + ".csv";
    out.csvs.push_back(dir / file);
    write_series_csv(out.csvs.back(), results[i], base);
    m.series.push_back({file, preset.series[i].label, preset.series[i].style, preset.series[i].spec});
  }
  out.manifest = dir / (name + "_manifest.json");
  std::ofstream mf(out.manifest, std::ios::binary);
  if (!mf) throw IoError("cannot write '" + out.manifest.string() + "'");
  mf << to_json(m).dump(2) << '\n';
  if (!mf) throw IoError("write failed for '" + out.manifest.string() + "'");
  return out;
}

/// Parses a sweep CSV back into points; '#' lines and the header are skipped.
inline std::vector<SeriesPoint> read_series_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<SeriesPoint> out;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "gt,concurrence,eof")
        throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": unexpected header");
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 3 columns");
    const std::string where = path.string() + ":" + std::to_string(lineno);
    out.push_back({parse_double(where, a), parse_double(where, b), parse_double(where, c)});
  }
  return out;
}

} // namespace stark

#endif
