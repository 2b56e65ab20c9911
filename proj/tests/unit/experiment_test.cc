#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "touchcs/csv.h"
#include "touchcs/experiment.h"

namespace touchcs {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("TOUCHCS_TEST_TMP");
  const fs::path root = env ? fs::path(env) : fs::temp_directory_path() / "touchcs_tests";
  const fs::path dir = root / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg = parse_config(
      "grid.sets = 120/3/24/4, 90/5/20/4\n"
      "scene.snr_tsp_db = 25\n"
      "sweep.vth = 0.25, 0.5, 1, 2, 4, 8\n"
      "sweep.trials = 150\n"
      "run.schemes = context_aware, context_aware_pp, tdm, cdm\n"
      "energy.event_probability = 0.1\n");
  return cfg;
}

TEST(RunExperiment, WritesEveryFileWithSchemaHeaders) {
  ExperimentConfig cfg = small_config();
  cfg.output_dir = scratch("files").string();
  const ExperimentResult r = run_experiment(cfg);
  const fs::path dir = cfg.output_dir;
  for (const char* name : {"roc.csv", "energy.csv", "manifest.txt",
                           "curves/roc_N120_k3_m24_l4.csv", "curves/roc_N90_k5_m20_l4.csv"}) {
    EXPECT_TRUE(fs::exists(dir / name)) << name;
  }
  const auto roc = lines(slurp(dir / "roc.csv"));
  EXPECT_EQ(roc.front(), csv::kRocHeader);
  EXPECT_EQ(roc.size(), 1u + 2 * 4 * 6);
  EXPECT_EQ(lines(slurp(dir / "energy.csv")).front(), csv::kEnergyHeader);
  EXPECT_EQ(r.roc_rows.size(), 48u);
  EXPECT_EQ(r.files.size(), 5u);

  const std::string manifest = slurp(dir / "manifest.txt");
  EXPECT_NE(manifest.find("tool = touchcs " + tool_version()), std::string::npos);
  EXPECT_NE(manifest.find("grid.sets = 120/3/24/4, 90/5/20/4"), std::string::npos);
  EXPECT_EQ(manifest.find("run.threads"), std::string::npos);
}

TEST(RunExperiment, CsvRowsParseBackToTheSameText) {
  ExperimentConfig cfg = small_config();
  cfg.output_dir = scratch("roundtrip").string();
  run_experiment(cfg);
  const auto roc = lines(slurp(fs::path(cfg.output_dir) / "roc.csv"));
  for (std::size_t i = 1; i < roc.size(); ++i) {
    const csv::RocRow row = csv::parse_roc_row(roc[i]);
    EXPECT_EQ(csv::format_row(row), roc[i]);
    EXPECT_GE(row.tpr, 0.0);
    EXPECT_LE(row.tpr, 1.0);
    EXPECT_GE(row.fpr, 0.0);
    EXPECT_LE(row.fpr, 1.0);
    EXPECT_GE(row.mean_measurements, static_cast<double>(row.m) - 1e-9);
  }
  const auto energy = lines(slurp(fs::path(cfg.output_dir) / "energy.csv"));
  for (std::size_t i = 1; i < energy.size(); ++i) {
    const csv::EnergyRow row = csv::parse_energy_row(energy[i]);
    EXPECT_EQ(csv::format_row(row), energy[i]);
    EXPECT_GE(row.recall, 0.9);
    EXPECT_LE(row.saving, static_cast<double>(row.N) / static_cast<double>(row.m));
  }
}

TEST(RunExperiment, SameConfigSameBytes) {
  ExperimentConfig cfg = small_config();
  cfg.output_dir = scratch("rep_a").string();
  run_experiment(cfg);
  const fs::path a = cfg.output_dir;
  cfg.output_dir = scratch("rep_b").string();
  cfg.threads = 8;
  run_experiment(cfg);
  const fs::path b = cfg.output_dir;
  for (const char* name : {"roc.csv", "energy.csv", "manifest.txt"}) {
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
}

TEST(RunExperiment, SeedChangesResults) {
  ExperimentConfig cfg = small_config();
  cfg.energy_enabled = false;
  const auto a = compute_experiment(cfg);
  cfg.seed = 2;
  const auto b = compute_experiment(cfg);
  EXPECT_NE(a.roc_rows, b.roc_rows);
  EXPECT_TRUE(a.energy_rows.empty());
}

TEST(RunExperiment, PartsSelectOutputs) {
  ExperimentConfig cfg = small_config();
  cfg.output_dir = scratch("parts").string();
  const auto roc_only = run_experiment(cfg, RunParts::kRocOnly);
  EXPECT_TRUE(roc_only.energy_rows.empty());
  EXPECT_FALSE(fs::exists(fs::path(cfg.output_dir) / "energy.csv"));
  const auto energy_only = compute_experiment(cfg, RunParts::kEnergyOnly);
  EXPECT_TRUE(energy_only.roc_rows.empty());
  EXPECT_EQ(energy_only.energy_rows.size(), 2u);
}

TEST(RunExperiment, DesignGridGivesOneCurvePerSet) {
  ExperimentConfig cfg = parse_config(
      "grid.N = 5000, 10000\ngrid.k = 5\n"
      "grid.sampling_ratio = 0.467, 0.2, 0.1, 0.042, 0.024, 0.012\n"
      "sweep.vth = 0.5, 1, 2\nsweep.trials = 4\nenergy.enabled = false\n");
  cfg.output_dir = scratch("design").string();
  run_experiment(cfg);
  for (const char* n : {"_N5000_", "_N10000_"}) {
    std::size_t count = 0;
    for (const auto& entry : fs::directory_iterator(fs::path(cfg.output_dir) / "curves")) {
      if (entry.path().filename().string().find(n) != std::string::npos) ++count;
    }
    EXPECT_EQ(count, 6u) << n;
  }
}

TEST(RunExperiment, UnwritableOutputNamesThePath) {
  const fs::path dir = scratch("blocked");
  fs::create_directories(dir);
  std::ofstream(dir / "file") << "x";
  ExperimentConfig cfg = small_config();
  cfg.trials = 2;
  cfg.output_dir = (dir / "file" / "out").string();
  try {
    run_experiment(cfg);
    FAIL() << "expected an I/O error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find(cfg.output_dir), std::string::npos) << e.what();
  }
}

TEST(ExperimentIds, DependOnlyOnParameters) {
  EXPECT_EQ(roc_experiment_id({420, 5, 20, 10000}), roc_experiment_id({420, 5, 20, 10000}));
  EXPECT_NE(roc_experiment_id({420, 5, 20, 10000}), roc_experiment_id({420, 5, 20, 9999}));
  EXPECT_NE(roc_experiment_id({420, 5, 20, 10000}), energy_experiment_id({420, 5, 20, 10000}));
}

}  // namespace
}  // namespace touchcs
