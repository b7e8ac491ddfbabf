#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "stark/config.hpp"
#include "stark/sweep.hpp"
#include "stark/validate.hpp"

using namespace stark;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("stark_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

KeyValues kv(const std::string& text) {
  std::istringstream in(text);
  return KeyValues::parse(in, "test.cfg");
}

} // namespace

TEST(KeyValues, Grammar) {
  const KeyValues k = kv("# header\n\n delta_over_g = [0, 2, -1.5]  # trailing\nbeta_over_g=1,2\nn0 = 3\n"
                         "renormalize_thermal = yes\n");
  std::vector<double> d, b;
  int n0 = 0;
  bool renorm = false;
  k.read("delta_over_g", d);
  k.read("beta_over_g", b);
  k.read("n0", n0);
  k.read("renormalize_thermal", renorm);
  EXPECT_EQ(d, (std::vector<double>{0.0, 2.0, -1.5}));
  EXPECT_EQ(b, (std::vector<double>{1.0, 2.0}));
  EXPECT_EQ(n0, 3);
  EXPECT_TRUE(renorm);
}

TEST(KeyValues, Errors) {
  EXPECT_THROW(kv("just text\n"), ConfigError);
  EXPECT_THROW(kv("a = 1\na = 2\n"), ConfigError);
  EXPECT_THROW(kv("Bad-Key = 1\n"), ConfigError);
  EXPECT_THROW(kv("a =\n"), ConfigError);
  double x = 0;
  EXPECT_THROW(kv("a = 1.5x\n").read("a", x), ConfigError);
  EXPECT_THROW(kv("a = nan\n").read("a", x), ConfigError);
  std::vector<double> v;
  EXPECT_THROW(kv("a = [1, 2\n").read("a", v), ConfigError);
  int i = 0;
  EXPECT_THROW(kv("a = 2.5\n").read("a", i), ConfigError);
  bool f = false;
  EXPECT_THROW(kv("a = maybe\n").read("a", f), ConfigError);
  try {
    kv("a = 1\nb = oops\n").read("b", x);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("test.cfg:2"), std::string::npos);
  }
  EXPECT_THROW(KeyValues::load("/nonexistent/stark.cfg"), IoError);
}

TEST(SweepConfig, ValidationNamesTheField) {
  SweepConfig c;
  EXPECT_NO_THROW(c.validate());
  auto expect_field = [](SweepConfig bad, const std::string& field) {
    try {
      bad.validate();
      FAIL() << field;
    } catch (const ConfigError& e) {
      EXPECT_EQ(std::string(e.what()).rfind(field, 0), 0u) << e.what();
    }
  };
  SweepConfig b = c;
  b.gt_step = 0;
  expect_field(b, "gt_step");
  b = c;
  b.gt_max = 0;
  expect_field(b, "gt_max");
  b = c;
  b.gt_min = -1;
  expect_field(b, "gt_min");
  b = c;
  b.tail_tol = 1e-3;
  expect_field(b, "tail_tol");
  b = c;
  b.nbar = {-0.1};
  expect_field(b, "nbar");
  b = c;
  b.n0 = -2;
  expect_field(b, "n0");
  EXPECT_THROW(c.apply(kv("gt_stepp = 1\n")), ConfigError);
}

TEST(FormatNumber, SeventeenSignificantDigits) {
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(1e-20), "1e-20");
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(0.1 + 0.2), "0.30000000000000004");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int k = 0; k < 1000; ++k) {
    const double v = u(rng) * std::pow(10.0, 40 * u(rng));
    EXPECT_EQ(std::strtod(format_number(v).c_str(), nullptr), v);
  }
}

TEST(GtGrid, InclusiveAndIndexBased) {
  const auto g = gt_grid(0.0, 4.0, 0.005);
  ASSERT_EQ(g.size(), 801u);
  EXPECT_EQ(g.front(), 0.0);
  EXPECT_DOUBLE_EQ(g.back(), 4.0);
  EXPECT_EQ(g[3], 3 * 0.005);
  EXPECT_EQ(gt_grid(0.0, 1.0, 0.3).size(), 4u);
}

TEST(RunSweep, WritesDeterministicCsvs) {
  SweepConfig c;
  c.delta_over_g = {0.0, -1.0};
  c.beta_over_g = {1.0};
  c.nbar = {0.0, 0.1};
  c.gt_max = 2.0;
  c.gt_step = 0.05;
  c.output_path = scratch("sweep_a").string();
  const auto a = run_sweep(c);
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a[0].filename(), "sweep_d0_b1_nbar0.csv");
  EXPECT_EQ(a[3].filename(), "sweep_dm1_b1_nbar0.1.csv");

  c.output_path = scratch("sweep_b").string();
  c.workers = 0;
  const auto b = run_sweep(c);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(slurp(a[i]), slurp(b[i])) << a[i];

  const std::string text = slurp(a[1]);
  EXPECT_NE(text.find("# field = thermal"), std::string::npos);
  EXPECT_NE(text.find("# thermal_cutoff = 9"), std::string::npos);
  EXPECT_NE(text.find("# tail_deficit = "), std::string::npos);
  EXPECT_NE(text.find("\ngt,concurrence,eof\n0,0,0\n"), std::string::npos);

  const auto pts = read_series_csv(a[0]);
  ASSERT_EQ(pts.size(), 41u);
  for (std::size_t i = 1; i < pts.size(); ++i) EXPECT_GT(pts[i].gt, pts[i - 1].gt);
}

TEST(RunSweep, ResonantValueAtRabiAngleOne) {
  SweepConfig c;
  c.gt_min = 0.0;
  c.gt_max = 1.0;
  c.gt_step = 0.5;
  const auto r = compute_series({SeriesSpec{0.0, 0.0, 0.0}}, c);
  ASSERT_EQ(r[0].points.size(), 3u);
  EXPECT_NEAR(r[0].points[2].eof, 0.13606123128089832, 1e-14);
}

TEST(RunSweep, EnvironmentSuppliesDefaultDirectory) {
  const fs::path dir = scratch("env_out");
  ::setenv(kOutputDirEnv, dir.c_str(), 1);
  SweepConfig c;
  c.gt_max = 0.5;
  c.gt_step = 0.25;
  const auto paths = run_sweep(c);
  ::unsetenv(kOutputDirEnv);
  ASSERT_EQ(paths.size(), 1u);
  EXPECT_EQ(paths[0].parent_path(), dir);
  EXPECT_TRUE(fs::exists(paths[0]));
}

TEST(RunSweep, UnwritableDirectoryIsIoError) {
  const fs::path file = scratch("plain_file");
  std::ofstream(file) << "x";
  SweepConfig c;
  c.output_path = (file / "sub").string();
  EXPECT_THROW(run_sweep(c), IoError);
}

TEST(RunSweep, SignFlipGivesIdenticalEof) {
  SweepConfig c;
  c.gt_step = 0.01;
  const auto r = compute_series({{2.0, 2.0, 0.0}, {-2.0, -2.0, 0.0}, {-1.0, 1.0, 0.1}, {1.0, -1.0, 0.1}}, c);
  for (std::size_t j = 0; j < r[0].points.size(); ++j) {
    ASSERT_NEAR(r[0].points[j].eof, r[1].points[j].eof, 1e-12);
    ASSERT_NEAR(r[2].points[j].eof, r[3].points[j].eof, 1e-12);
  }
}

TEST(Presets, SeriesMatchCaptions) {
  const auto f2 = figure_preset("fig2");
  ASSERT_EQ(f2.series.size(), 2u);
  EXPECT_EQ(f2.series[0].style, "solid");
  EXPECT_EQ(f2.series[1].style, "dotted");
  EXPECT_EQ(f2.series[1].spec.delta_over_g, 2.0);
  EXPECT_EQ(f2.series[1].spec.beta_over_g, 2.0);
  EXPECT_EQ(f2.series[1].spec.nbar, 0.0);
  const auto f3 = figure_preset("fig3");
  EXPECT_EQ(f3.series[1].spec.delta_over_g, -1.0);
  EXPECT_EQ(f3.series[1].spec.beta_over_g, 1.0);
  EXPECT_EQ(figure_preset("fig4").series[1].spec.nbar, 0.1);
  EXPECT_EQ(figure_preset("fig5").series[0].spec.nbar, 0.1);
  const auto f6 = figure_preset("fig6", 0.5);
  ASSERT_EQ(f6.series.size(), 1u);
  EXPECT_EQ(f6.series[0].spec.delta_over_g, -2.0);
  EXPECT_EQ(f6.series[0].spec.nbar, 0.5);
  EXPECT_FALSE(f6.assumptions.empty());
  EXPECT_THROW(figure_preset("fig1"), ConfigError);
}

TEST(Presets, ManifestRoundTripsAndReferencesCsvs) {
  SweepConfig c;
  c.gt_max = 1.0;
  c.gt_step = 0.1;
  for (const std::string name : {"fig2", "fig3", "fig4", "fig5", "fig6"}) {
    c.output_path = scratch("preset_" + name).string();
    const PresetOutput out = run_preset(name, c);
    EXPECT_EQ(out.csvs.size(), name == "fig6" ? 1u : 2u);
    const auto j = nlohmann::json::parse(slurp(out.manifest));
    const PlotManifest m = manifest_from_json(j);
    EXPECT_EQ(manifest_from_json(to_json(m)), m);
    EXPECT_EQ(m.figure, name);
    EXPECT_EQ(m.x_label, "gt");
    EXPECT_EQ(m.y_label, "E_F");
    ASSERT_EQ(m.series.size(), out.csvs.size());
    for (const auto& s : m.series) {
      const auto pts = read_series_csv(out.manifest.parent_path() / s.csv);
      EXPECT_EQ(pts.size(), 11u);
    }
  }
  EXPECT_THROW(manifest_from_json(nlohmann::json::parse(R"({"figure": "fig2"})")), ConfigError);
  auto empty = to_json(PlotManifest{"fig2", "gt", "E_F", "fig2.png", {}, {}});
  EXPECT_THROW(manifest_from_json(empty), ConfigError);
}

TEST(ValidateConfig, ParsesBothForms) {
  const auto ladder = ValidateConfig::from(
      kv("omega = 1000\nomega_g = 0\ng1 = 1\ng2 = 1\ndetunings = [50, 100]\ngt_max = 2\nfield_cutoff = 20\n"));
  ASSERT_EQ(ladder.runs.size(), 2u);
  EXPECT_DOUBLE_EQ(ladder.runs[1].detuning_lower(), 100.0);
  EXPECT_EQ(ladder.options.field_cutoff, 20);
  EXPECT_EQ(ladder.gt_max, 2.0);

  const auto explicit_levels =
      ValidateConfig::from(kv("omega_e = 2000\nomega_i = 1100\nomega_g = 0\nomega = 1000\ng1 = 0\ng2 = 0\n"));
  ASSERT_EQ(explicit_levels.runs.size(), 1u);

  EXPECT_THROW(ValidateConfig::from(kv("omega = 1\n")), ConfigError);
  EXPECT_THROW(ValidateConfig::from(kv("omega_e = 1\nomega_i = 2\nomega_g = 0\nomega = 1\ng1 = 1\ng2 = 1\n")),
               ConfigError);
  EXPECT_THROW(ValidateConfig::from(kv("omega = 1000\nomega_g = 0\ng1 = 1\ng2 = 1\ndetunings = 5\ncolour = 1\n")),
               ConfigError);
}

TEST(RunValidate, ZeroCouplingAndLadder) {
  auto zero = ValidateConfig::from(
      kv("omega_e = 2000\nomega_i = 1100\nomega_g = 0\nomega = 1000\ng1 = 0\ng2 = 0\ngt_step = 0.1\n"));
  const auto z = run_validate(zero);
  EXPECT_TRUE(z.passed());
  EXPECT_EQ(z.rows[0].report.max_abs_diff, 0.0);

  auto ladder = ValidateConfig::from(
      kv("omega = 1000\nomega_g = 0\ng1 = 1\ng2 = 1\ndetunings = [50, 100, 200]\ngt_step = 0.02\n"));
  const auto rep = run_validate(ladder);
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_TRUE(rep.monotone);
  EXPECT_TRUE(rep.within_tolerance);
  EXPECT_LE(rep.rows[1].report.max_abs_diff, 0.05);

  std::ostringstream text;
  print_report(text, rep);
  EXPECT_NE(text.str().find("PASS"), std::string::npos);
  const auto j = to_json(rep);
  EXPECT_EQ(j["rows"].size(), 3u);
  EXPECT_TRUE(j["passed"].get<bool>());
}
