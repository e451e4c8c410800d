#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "topbin/io.hpp"
#include "topbin/measures.hpp"

namespace topbin {

// Everything one run needs. CLI flags mirror these fields one-to-one in
// kebab-case; a JSON config file supplies defaults that flags override.
// TOPBIN_SEED in the environment beats both.
struct RunConfig {
  std::filesystem::path input_path;
  CsvFormat format = CsvFormat::ScoresCsv;
  MeasureKind measure = MeasureKind::pmax();
  int event_k = 1;
  std::size_t m_bins = 10;
  std::size_t folds = 0;  // 0 = half-split evaluation
  std::uint64_t seed = 0;
  double delta = 0.05;
  bool regularize = true;
  std::size_t top_bins = 1;
  std::filesystem::path output_dir = ".";
  std::optional<Direction> direction;  // override the measure default

  void validate() const;
};

RunConfig load_config_file(const std::filesystem::path& path);

// Applies TOPBIN_SEED if set; returns true when the override happened.
bool apply_seed_env(RunConfig& config);

// ingest -> series -> split/fold -> fit -> score. Writes binmodel.json,
// report.json and reliability.csv into config.output_dir.
// With folds = 0 the model is fitted on the shuffled calibration half and
// scored on the other half; with folds >= 2 a k-fold report is added, the
// shipped model is refitted on the full series, and the reliability pair
// comes from fold 0.
void run_calibrate(const RunConfig& config);

// Fits a Top-1 model inline and writes suspects.csv (confident
// misclassifications; see flag_suspect_labels).
void run_flag(const RunConfig& config);

// Exit code for a thrown Error: 3 for data problems, 4 for numeric ones.
int exit_code_for(const Error& error);

}  // namespace topbin
