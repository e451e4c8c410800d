// topbin — calibrated Top-k correctness probabilities from binned
// uncertainty values, plus scoring reports and mislabel flagging.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "topbin/runner.hpp"

namespace {

struct FlagValues {
  std::optional<std::string> input;
  std::optional<std::string> format;
  std::optional<std::string> measure;
  std::optional<int> event_k;
  std::optional<std::size_t> m_bins;
  std::optional<std::size_t> folds;
  std::optional<std::uint64_t> seed;
  std::optional<double> delta;
  std::optional<bool> regularize;
  std::optional<std::size_t> top_bins;
  std::optional<std::string> output_dir;
  std::optional<std::string> direction;
  std::optional<std::string> config_file;
};

void add_common_flags(CLI::App& cmd, FlagValues& values) {
  cmd.add_option("--config", values.config_file,
                 "JSON config file; flags override its values");
  cmd.add_option("-i,--input", values.input, "input CSV file");
  cmd.add_option("--format", values.format,
                 "input layout: scores, scalar or ensemble");
  cmd.add_option("--measure", values.measure,
                 "uncertainty measure: pmax, neg-log-pmax, entropy, "
                 "neg-log-top<k>-sum, ensemble-cov, external-prob-entropy");
  cmd.add_option("--event-k", values.event_k,
                 "calibrate the Top-k correctness event");
  cmd.add_option("--m-bins", values.m_bins, "number of quantile bins");
  cmd.add_option("--folds", values.folds,
                 "cross-validation folds; 0 = half split");
  cmd.add_option("--seed", values.seed, "split/shuffle seed");
  cmd.add_option("--delta", values.delta,
                 "confidence parameter for interval bounds");
  cmd.add_option("--regularize", values.regularize,
                 "pull bin frequencies off 0/1 with one pseudo-observation");
  cmd.add_option("--top-bins", values.top_bins,
                 "how many of the most confident bins to inspect when "
                 "flagging");
  cmd.add_option("-o,--output-dir", values.output_dir,
                 "directory for result files");
  cmd.add_option("--direction", values.direction,
                 "override confidence direction: higher or lower");
}

topbin::RunConfig resolve_config(const FlagValues& values) {
  topbin::RunConfig config;
  if (values.config_file) {
    config = topbin::load_config_file(*values.config_file);
  }
  if (values.input) config.input_path = *values.input;
  if (values.format) {
    config.format = topbin::csv_format_from_name(*values.format);
  }
  if (values.measure) {
    config.measure = topbin::measure_from_name(*values.measure);
  }
  if (values.event_k) config.event_k = *values.event_k;
  if (values.m_bins) config.m_bins = *values.m_bins;
  if (values.folds) config.folds = *values.folds;
  if (values.seed) config.seed = *values.seed;
  if (values.delta) config.delta = *values.delta;
  if (values.regularize) config.regularize = *values.regularize;
  if (values.top_bins) config.top_bins = *values.top_bins;
  if (values.output_dir) config.output_dir = *values.output_dir;
  if (values.direction) {
    if (*values.direction == "higher") {
      config.direction = topbin::Direction::HigherMoreConfident;
    } else if (*values.direction == "lower") {
      config.direction = topbin::Direction::LowerMoreConfident;
    } else {
      throw topbin::Error(topbin::ErrorCode::InvalidArgument,
                          "direction must be 'higher' or 'lower'");
    }
  }
  topbin::apply_seed_env(config);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Calibrated Top-k correctness probabilities via quantile binning"};
  app.require_subcommand(1);

  FlagValues calibrate_values;
  CLI::App* calibrate = app.add_subcommand(
      "calibrate",
      "fit bins, score them, write binmodel.json / report.json / "
      "reliability.csv");
  add_common_flags(*calibrate, calibrate_values);

  FlagValues flag_values;
  CLI::App* flag = app.add_subcommand(
      "flag", "list confidently misclassified samples (suspects.csv)");
  add_common_flags(*flag, flag_values);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // CLI11 prints --help output through exit(); keep its message, pin our
    // usage-error code.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  // Bad flag or config-file values are usage errors, distinct from bad data.
  topbin::RunConfig config;
  try {
    config = resolve_config(calibrate->parsed() ? calibrate_values : flag_values);
  } catch (const std::exception& e) {
    std::cerr << "topbin: " << e.what() << "\n";
    return 2;
  }

  try {
    if (calibrate->parsed()) {
      topbin::run_calibrate(config);
    } else {
      topbin::run_flag(config);
    }
  } catch (const topbin::Error& e) {
    std::cerr << "topbin: " << e.what() << "\n";
    return topbin::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "topbin: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
