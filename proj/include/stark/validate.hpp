#ifndef STARK_VALIDATE_HPP
#define STARK_VALIDATE_HPP

// Effective-vs-full comparison driven by a config file.
//
// Two forms are accepted. Explicit levels:
//   omega_e, omega_i, omega_g, omega, g1, g2
// or a detuning ladder, one run per lower one-photon detuning:
//   omega, omega_g, g1, g2, delta, detunings = [50, 100, 200]
// Common keys: gt_max, gt_step, field_cutoff, n0, nbar, tail_tol,
// leakage_bound, tolerance.

#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "config.hpp"
#include "micro_oracle.hpp"
#include "sweep.hpp"

namespace stark {

struct ValidateConfig {
  std::vector<micro::MicroParams> runs;
  std::vector<double> detunings;  ///< ladder mode only
  double gt_max = 3.0;
  double gt_step = 0.01;
  micro::ComparisonOptions options;
  double tolerance = 0.05;  ///< maximum allowed |E_F(effective) - E_F(full)|

  static ValidateConfig from(const KeyValues& kv) {
    kv.reject_unknown({"omega_e", "omega_i", "omega_g", "omega", "g1", "g2", "delta", "detunings", "gt_max",
                       "gt_step", "field_cutoff", "n0", "nbar", "tail_tol", "leakage_bound", "tolerance"});
    ValidateConfig c;
    auto need = [&](const std::string& key) {
      if (!kv.has(key)) throw ConfigError("validate config: missing key '" + key + "'");
      return parse_double(kv.where(key), kv.value(key));
    };
    const double omega = need("omega"), omega_g = need("omega_g"), g1 = need("g1"), g2 = need("g2");
    try {
      if (kv.has("detunings")) {
        if (kv.has("omega_e") || kv.has("omega_i"))
          throw ConfigError("validate config: 'detunings' excludes omega_e/omega_i");
        double delta = 0.0;
        kv.read("delta", delta);
        kv.read("detunings", c.detunings);
        for (double d : c.detunings) c.runs.push_back(micro::MicroParams::ladder(omega, omega_g, g1, g2, d, delta));
      } else {
        if (kv.has("delta")) throw ConfigError("validate config: 'delta' only applies with 'detunings'");
        micro::MicroParams p{need("omega_e"), need("omega_i"), omega_g, omega, g1, g2};
        p.validate();
        c.runs.push_back(p);
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("validate config: ") + e.what());
    }
    kv.read("gt_max", c.gt_max);
    kv.read("gt_step", c.gt_step);
    kv.read("field_cutoff", c.options.field_cutoff);
    kv.read("n0", c.options.n0);
    kv.read("nbar", c.options.nbar);
    kv.read("tail_tol", c.options.tail_tol);
    kv.read("leakage_bound", c.options.leakage_bound);
    kv.read("tolerance", c.tolerance);
    if (!(c.gt_max > 0.0) || !(c.gt_step > 0.0)) throw ConfigError("validate config: gt_max and gt_step must be > 0");
    if (c.options.n0 < 0 || !(c.options.nbar >= 0.0)) throw ConfigError("validate config: n0 and nbar must be >= 0");
    if (!(c.options.tail_tol > 0.0 && c.options.tail_tol < 1.0))
      throw ConfigError("validate config: tail_tol must lie in (0, 1)");
    if (!(c.tolerance > 0.0)) throw ConfigError("validate config: tolerance must be > 0");
    return c;
  }
};

struct ValidationRow {
  micro::MicroParams params;
  double detuning = 0.0;  ///< lower one-photon detuning
  micro::ComparisonReport report;
  std::vector<std::string> warnings;
};

struct ValidationReport {
  std::vector<ValidationRow> rows;
  double tolerance = 0.05;
  bool within_tolerance = true;
  bool monotone = true;  ///< max deviation non-increasing along the ladder

  bool passed() const { return within_tolerance && monotone; }
};

inline ValidationReport run_validate(const ValidateConfig& cfg) {
  const std::vector<double> grid = gt_grid(0.0, cfg.gt_max, cfg.gt_step);
  ValidationReport rep;
  rep.tolerance = cfg.tolerance;
  for (const auto& p : cfg.runs) {
    ValidationRow row;
    row.params = p;
    row.detuning = p.detuning_lower();
    row.warnings = p.adiabaticity_warnings();
    try {
      row.report = micro::compare_effective_vs_full(p, grid, cfg.options);
    } catch (const std::out_of_range& e) {
      throw ConfigError(std::string("validate: ") + e.what());
    } catch (const std::domain_error& e) {
      throw ValidationFailure(std::string("validate: ") + e.what());
    }
    if (row.report.max_abs_diff > cfg.tolerance) rep.within_tolerance = false;
    if (!rep.rows.empty() && row.report.max_abs_diff > rep.rows.back().report.max_abs_diff)
      rep.monotone = false;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

inline void print_report(std::ostream& out, const ValidationReport& rep) {
  char buf[256];
  out << "effective vs full three-level model (E_F over gt grid)\n";
  std::snprintf(buf, sizeof buf, "%14s %12s %14s %14s %14s\n", "detuning", "g_eff", "max|dE_F|", "mean|dE_F|",
                "peak leakage");
  out << buf;
  for (const auto& r : rep.rows) {
    std::snprintf(buf, sizeof buf, "%14.6g %12.6g %14.6e %14.6e %14.6e\n", r.detuning, r.report.effective.g_eff,
                  r.report.max_abs_diff, r.report.mean_abs_diff, r.report.peak_leakage);
    out << buf;
    for (const auto& w : r.warnings) out << "  warning: " << w << '\n';
  }
  out << "tolerance " << format_number(rep.tolerance) << ": " << (rep.within_tolerance ? "ok" : "EXCEEDED") << '\n';
  if (rep.rows.size() > 1) out << "monotone in detuning: " << (rep.monotone ? "yes" : "NO") << '\n';
  out << (rep.passed() ? "PASS" : "FAIL") << '\n';
}

inline nlohmann::json to_json(const ValidationReport& rep) {
  nlohmann::json j;
  j["tool_version"] = kVersion;
  j["tolerance"] = rep.tolerance;
  j["within_tolerance"] = rep.within_tolerance;
  j["monotone"] = rep.monotone;
  j["passed"] = rep.passed();
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rep.rows) {
    const auto& e = r.report.effective;
    j["rows"].push_back({{"omega_e", r.params.omega_e},
                         {"omega_i", r.params.omega_i},
                         {"omega_g", r.params.omega_g},
                         {"omega", r.params.omega},
                         {"g1", r.params.g1},
                         {"g2", r.params.g2},
                         {"detuning", r.detuning},
                         {"g_eff", e.g_eff},
                         {"beta_e", e.beta_e},
                         {"beta_g", e.beta_g},
                         {"delta", e.delta},
                         {"max_abs_diff", r.report.max_abs_diff},
                         {"mean_abs_diff", r.report.mean_abs_diff},
                         {"peak_leakage", r.report.peak_leakage},
                         {"warnings", r.warnings}});
  }
  return j;
}

} // namespace stark

#endif
