#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "topbin/errors.hpp"

namespace topbin {

// One sample's raw model outputs plus ground truth. Scores are unnormalized
// model outputs f(x); softmax is applied downstream where a measure needs it.
struct PredictionRecord {
  std::vector<double> scores;                               // length K
  std::optional<std::vector<std::vector<double>>> ensemble_scores;  // M x K
  int true_label = 0;
  std::string sample_id;

  std::size_t num_classes() const { return scores.size(); }
};

// Checks every record invariant (K >= 2, finite scores, label in range,
// rectangular ensembles with M >= 2) and returns the input unchanged.
// Throws Error naming the offending sample_id.
const std::vector<PredictionRecord>& validate_records(
    const std::vector<PredictionRecord>& records);

enum class Direction {
  HigherMoreConfident,
  LowerMoreConfident,
};

// The binary event being calibrated: true label among the k best-scored
// classes (k = 1 is plain Top-1 correctness).
struct EventKind {
  int k = 1;

  bool operator==(const EventKind&) const = default;
};

// Paired (scalar uncertainty, binary outcome) sequence for one event.
struct EventSeries {
  std::vector<double> uncertainties;
  std::vector<std::uint8_t> outcomes;  // 0/1
  EventKind event_kind;
  Direction direction = Direction::HigherMoreConfident;

  std::size_t size() const { return uncertainties.size(); }

  // Mean outcome (the model's accuracy on this event).
  double accuracy() const;

  void validate() const;
};

// Fitted histogram calibrator: edges carry -inf / +inf sentinels so every
// real maps to exactly one right-closed bin (e_i, e_{i+1}].
struct BinModel {
  std::vector<double> edges;      // bins + 1, strictly increasing
  std::vector<double> probs;      // calibrated probability per bin
  std::vector<double> raw_probs;  // unregularized empirical frequencies
  std::vector<double> weights;    // bin mass, sums to 1
  std::vector<std::size_t> counts;
  double accuracy = 0.0;  // mean outcome of the fitting series
  bool regularized = false;
  EventKind event_kind;
  std::string measure;  // canonical measure name, empty if not set

  std::size_t bin_count() const { return probs.size(); }

  // Bin indices whose count is zero (test-side evaluations inherit the
  // training probability there with weight zero).
  std::vector<std::size_t> zero_count_bins() const;

  void validate() const;

  // Analytic histogram (no underlying samples); edges become 0..n with
  // sentinels and counts stay zero. Accuracy defaults to sum(w_i * p_i).
  static BinModel from_histogram(std::vector<double> probs,
                                 std::vector<double> weights,
                                 std::optional<double> accuracy = std::nullopt);

  // Same bins in reverse order (descending uncertainty). Order matters for
  // AUROC but not for EOR or the proper scores.
  BinModel reversed() const;
};

// Hoeffding interval around a bin probability.
struct ConfidenceInterval {
  double center = 0.0;
  double half_width = 0.0;
  double delta = 0.0;

  double lower() const;  // clamped to [0, 1]
  double upper() const;
};

// Decomposition of a proper score: score = uncertainty - resolution
// + calibration_error.
struct ScoreTerms {
  double uncertainty = 0.0;
  double resolution = 0.0;
  double calibration_error = 0.0;
};

// All scores for one (model, evaluation series) pair. NLL and EOR are only
// defined on strictly interior probabilities; they are NaN when the model
// was fitted without regularization and hit a boundary.
struct Scores {
  double brier = 0.0;
  double nll = 0.0;
  double ece = 0.0;
  double eor = 0.0;
  double auroc = 0.0;
  ScoreTerms brier_terms;
  ScoreTerms nll_terms;
};

struct ScoreReport {
  Scores overall;
  std::vector<Scores> folds;        // empty unless cross-validated
  std::optional<Scores> mean;       // over folds
  std::optional<Scores> std_dev;    // sample (n-1) standard deviation
  std::vector<std::string> warnings;
};

}  // namespace topbin
