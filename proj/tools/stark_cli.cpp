// stark: sweeps, figure presets and model validation for two atoms crossing
// a cavity under a Stark-shifted two-photon interaction.

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stark/config.hpp"
#include "stark/sweep.hpp"
#include "stark/validate.hpp"

namespace {

enum ExitCode : int { kOk = 0, kConfig = 2, kIo = 3, kNumerical = 4 };

/// Grid and field flags shared by `sweep` and `preset`. A flag given on the
/// command line overrides the same key from --config.
struct SweepFlags {
  std::string config;
  std::vector<double> delta, beta, nbar;
  int n0 = 0, workers = 1;
  double gt_min = 0, gt_max = 0, gt_step = 0, tail_tol = 0;
  bool renormalize = false;
  std::string out;
  std::vector<CLI::Option*> opts;

  void add(CLI::App& app, bool series_flags) {
    app.add_option("--config", config, "key = value config file")->check(CLI::ExistingFile);
    if (series_flags) {
      opts.push_back(app.add_option("--delta-over-g", delta, "two-photon detuning list")->delimiter(','));
      opts.push_back(app.add_option("--beta-over-g", beta, "Stark shift list")->delimiter(','));
      opts.push_back(app.add_option("--nbar", nbar, "mean thermal photon numbers (0 = Fock |n0>)")->delimiter(','));
      opts.push_back(app.add_option("--n0", n0, "initial Fock index for nbar = 0"));
    }
    opts.push_back(app.add_option("--gt-min", gt_min, "first Rabi angle"));
    opts.push_back(app.add_option("--gt-max", gt_max, "last Rabi angle"));
    opts.push_back(app.add_option("--gt-step", gt_step, "Rabi angle step"));
    opts.push_back(app.add_option("--tail-tol", tail_tol, "thermal tail mass tolerance"));
    opts.push_back(app.add_flag("--renormalize-thermal", renormalize, "divide thermal states by their trace"));
    opts.push_back(app.add_option("--out", out, std::string("output directory (default $") +
                                                   stark::kOutputDirEnv + " or .)"));
    opts.push_back(app.add_option("--workers", workers, "worker threads (0 = all cores)"));
  }

  stark::SweepConfig resolve() const {
    stark::SweepConfig cfg;
    if (!config.empty()) cfg.apply(stark::KeyValues::load(config));
    auto given = [&](const char* name) {
      for (auto* o : opts)
        if (o->check_name(name) && o->count() > 0) return true;
      return false;
    };
    if (given("--delta-over-g")) cfg.delta_over_g = delta;
    if (given("--beta-over-g")) cfg.beta_over_g = beta;
    if (given("--nbar")) cfg.nbar = nbar;
    if (given("--n0")) cfg.n0 = n0;
    if (given("--gt-min")) cfg.gt_min = gt_min;
    if (given("--gt-max")) cfg.gt_max = gt_max;
    if (given("--gt-step")) cfg.gt_step = gt_step;
    if (given("--tail-tol")) cfg.tail_tol = tail_tol;
    if (given("--renormalize-thermal")) cfg.renormalize_thermal = renormalize;
    if (given("--out")) cfg.output_path = out;
    if (given("--workers")) cfg.workers = workers;
    cfg.validate();
    return cfg;
  }
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entanglement of two Rydberg atoms via a Stark-shifted two-photon cavity interaction"};
  app.set_version_flag("--version", std::string(stark::kVersion));
  app.require_subcommand(1);

  auto* sweep = app.add_subcommand("sweep", "compute E_F(gt) for every (Delta/g, beta/g, nbar) combination");
  SweepFlags sweep_flags;
  sweep_flags.add(*sweep, true);

  auto* preset = app.add_subcommand("preset", "compute a figure preset (fig2..fig6) and its plot manifest");
  std::string preset_name;
  double preset_nbar = stark::kDefaultPresetNbar;
  preset->add_option("name", preset_name, "fig2, fig3, fig4, fig5 or fig6")->required();
  preset->add_option("--nbar", preset_nbar, "mean photon number for fig6");
  SweepFlags preset_flags;
  preset_flags.add(*preset, false);

  auto* validate = app.add_subcommand("validate", "compare the effective model against the full three-level model");
  std::string validate_config, validate_out;
  validate->add_option("--config", validate_config, "validation config file")->required()->check(CLI::ExistingFile);
  validate->add_option("--out", validate_out, "write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*sweep) {
      for (const auto& p : stark::run_sweep(sweep_flags.resolve())) std::cout << p.string() << '\n';
    } else if (*preset) {
      stark::SweepConfig cfg = preset_flags.resolve();
      const auto out = stark::run_preset(preset_name, cfg, preset_nbar);
      for (const auto& p : out.csvs) std::cout << p.string() << '\n';
      std::cout << out.manifest.string() << '\n';
    } else if (*validate) {
      const auto cfg = stark::ValidateConfig::from(stark::KeyValues::load(validate_config));
      const auto rep = stark::run_validate(cfg);
      stark::print_report(std::cout, rep);
      if (!validate_out.empty()) {
        std::ofstream f(validate_out, std::ios::binary);
        if (!f) throw stark::IoError("cannot write '" + validate_out + "'");
        f << stark::to_json(rep).dump(2) << '\n';
        if (!f) throw stark::IoError("write failed for '" + validate_out + "'");
      }
      if (!rep.passed()) return kNumerical;
    }
  } catch (const stark::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const stark::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kIo;
  } catch (const stark::ValidationFailure& e) {
    std::cerr << "validation failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}
