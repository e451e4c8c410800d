#include "topbin/runner.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "topbin/binning.hpp"
#include "topbin/evaluation.hpp"
#include "topbin/scoring.hpp"

namespace topbin {

void RunConfig::validate() const {
  if (input_path.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no input file given");
  }
  if (m_bins < 1) {
    throw Error(ErrorCode::InvalidArgument, "m_bins must be >= 1");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "delta must lie in (0,1)");
  }
  if (event_k < 1) {
    throw Error(ErrorCode::InvalidArgument, "event k must be >= 1");
  }
  if (folds == 1) {
    throw Error(ErrorCode::InvalidArgument,
                "folds must be 0 (half-split) or >= 2");
  }
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream stream(path);
  if (!stream) {
    throw Error(ErrorCode::ParseError, "cannot open '" + path.string() + "'");
  }
  nlohmann::json doc;
  try {
    stream >> doc;
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::ParseError,
                path.string() + ": " + std::string(e.what()));
  }
  RunConfig config;
  try {
    if (doc.contains("input_path")) {
      config.input_path = doc["input_path"].get<std::string>();
    }
    if (doc.contains("format")) {
      config.format = csv_format_from_name(doc["format"].get<std::string>());
    }
    if (doc.contains("measure")) {
      config.measure = measure_from_name(doc["measure"].get<std::string>());
    }
    if (doc.contains("event_k")) config.event_k = doc["event_k"].get<int>();
    if (doc.contains("m_bins")) {
      config.m_bins = doc["m_bins"].get<std::size_t>();
    }
    if (doc.contains("folds")) config.folds = doc["folds"].get<std::size_t>();
    if (doc.contains("seed")) {
      config.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("delta")) config.delta = doc["delta"].get<double>();
    if (doc.contains("regularize")) {
      config.regularize = doc["regularize"].get<bool>();
    }
    if (doc.contains("top_bins")) {
      config.top_bins = doc["top_bins"].get<std::size_t>();
    }
    if (doc.contains("output_dir")) {
      config.output_dir = doc["output_dir"].get<std::string>();
    }
    if (doc.contains("direction")) {
      const std::string d = doc["direction"].get<std::string>();
      if (d == "higher") {
        config.direction = Direction::HigherMoreConfident;
      } else if (d == "lower") {
        config.direction = Direction::LowerMoreConfident;
      } else {
        throw Error(ErrorCode::InvalidArgument,
                    "direction must be 'higher' or 'lower'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError,
                path.string() + ": " + std::string(e.what()));
  }
  return config;
}

bool apply_seed_env(RunConfig& config) {
  const char* env = std::getenv("TOPBIN_SEED");
  if (env == nullptr || *env == '\0') return false;
  std::uint64_t seed = 0;
  const char* end = env + std::string_view(env).size();
  const auto [ptr, ec] = std::from_chars(env, end, seed);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::InvalidArgument,
                "TOPBIN_SEED must be an unsigned integer, got '" +
                    std::string(env) + "'");
  }
  config.seed = seed;
  return true;
}

namespace {

struct LoadedSeries {
  EventSeries series;
  std::vector<std::string> ids;  // empty for record-based formats
  std::vector<PredictionRecord> records;
};

LoadedSeries load_series(const RunConfig& config) {
  LoadedSeries loaded;
  if (config.format == CsvFormat::ScalarCsv) {
    ScalarSeries scalar = ingest_scalar_csv(config.input_path);
    loaded.series = std::move(scalar.series);
    loaded.ids = std::move(scalar.ids);
    loaded.series.event_kind = EventKind{config.event_k};
  } else {
    loaded.records = ingest_records(config.input_path, config.format);
    loaded.series = build_event_series(
        loaded.records, config.measure, config.event_k,
        config.direction.value_or(default_direction(config.measure)));
  }
  if (config.direction) loaded.series.direction = *config.direction;
  return loaded;
}

std::string measure_label(const RunConfig& config) {
  return config.format == CsvFormat::ScalarCsv ? "scalar"
                                               : measure_name(config.measure);
}

void note_merged_bins(ScoreReport& report, const BinModel& model,
                      std::size_t requested) {
  if (model.bin_count() != requested) {
    report.warnings.push_back(
        "duplicate quantile edges: requested " + std::to_string(requested) +
        " bins, fitted " + std::to_string(model.bin_count()));
  }
}

void note_zero_bins(ScoreReport& report, const BinModel& evaluated) {
  const auto zeros = evaluated.zero_count_bins();
  if (zeros.empty()) return;
  std::string msg = "test split never reached bin(s)";
  for (std::size_t b : zeros) msg += " " + std::to_string(b);
  msg += "; they keep the training probability with weight 0";
  report.warnings.push_back(msg);
}

}  // namespace

void run_calibrate(const RunConfig& config) {
  config.validate();
  LoadedSeries loaded = load_series(config);
  const EventSeries& series = loaded.series;

  std::filesystem::create_directories(config.output_dir);

  ScoreReport report;
  BinModel shipped;   // goes to binmodel.json
  BinModel rel_train; // reliability.csv pair
  BinModel rel_test;

  if (config.folds == 0) {
    const auto [calibration, evaluation] = split_half(series, config.seed);
    shipped = fit_bin_model(calibration, config.m_bins, config.regularize);
    report.overall = score_pair(shipped, evaluation, series.direction);
    rel_train = shipped;
    rel_test = evaluate_bin_model(shipped, evaluation);
  } else {
    report = kfold_report(series, config.folds, config.m_bins, config.seed,
                          config.regularize);
    shipped = fit_bin_model(series, config.m_bins, config.regularize);
    // Reliability pair from fold 0: fitted on the other folds, tested on it.
    const auto folds = kfold_indices(series.size(), config.folds, config.seed);
    std::vector<std::size_t> train_indices;
    for (std::size_t f = 1; f < folds.size(); ++f) {
      train_indices.insert(train_indices.end(), folds[f].begin(),
                           folds[f].end());
    }
    rel_train = fit_bin_model(subset(series, train_indices), config.m_bins,
                              config.regularize);
    rel_test = evaluate_bin_model(rel_train, subset(series, folds[0]));
  }
  shipped.measure = measure_label(config);
  note_merged_bins(report, shipped, config.m_bins);
  note_zero_bins(report, rel_test);

  write_file_atomic(config.output_dir / "binmodel.json",
                    bin_model_to_json(shipped));
  write_file_atomic(config.output_dir / "report.json",
                    score_report_to_json(report));
  write_file_atomic(config.output_dir / "reliability.csv",
                    reliability_csv(rel_train, rel_test, config.delta));
}

void run_flag(const RunConfig& config) {
  config.validate();
  LoadedSeries loaded = load_series(config);

  // Mislabel hunting always inspects Top-1 correctness.
  EventSeries series = loaded.series;
  if (config.format != CsvFormat::ScalarCsv) {
    series = build_event_series(
        loaded.records, config.measure, 1,
        config.direction.value_or(default_direction(config.measure)));
  }

  const BinModel model =
      fit_bin_model(series, config.m_bins, config.regularize);
  std::vector<Suspect> suspects;
  if (config.format == CsvFormat::ScalarCsv) {
    suspects =
        flag_suspects_in_series(loaded.ids, series, model, config.top_bins);
  } else {
    suspects = flag_suspect_labels(loaded.records, model, config.measure,
                                   config.top_bins);
  }

  std::filesystem::create_directories(config.output_dir);
  write_file_atomic(config.output_dir / "suspects.csv",
                    suspects_csv(suspects));
}

int exit_code_for(const Error& error) {
  return is_data_error(error.code()) ? 3 : 4;
}

}  // namespace topbin
