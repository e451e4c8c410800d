#pragma once

#include <string>
#include <vector>

#include "topbin/types.hpp"

namespace topbin {

// Scalar uncertainty measures. NegLogTopKSum carries its own k (how many of
// the top softmax probabilities to sum), independent of the event being
// calibrated.
struct MeasureKind {
  enum class Kind {
    Pmax,
    NegLogPmax,
    Entropy,
    NegLogTopKSum,
    EnsembleCovSpectralNorm,
    ExternalProbEntropy,
  };

  Kind kind = Kind::Pmax;
  int k = 1;  // used by NegLogTopKSum only
  // Variant gate for the ensemble measure: softmax each member before
  // taking the covariance (off by default, raw score vectors).
  bool softmax_members = false;

  static MeasureKind pmax() { return {Kind::Pmax, 1, false}; }
  static MeasureKind neg_log_pmax() { return {Kind::NegLogPmax, 1, false}; }
  static MeasureKind entropy() { return {Kind::Entropy, 1, false}; }
  static MeasureKind neg_log_topk_sum(int k) {
    return {Kind::NegLogTopKSum, k, false};
  }
  static MeasureKind ensemble_cov() {
    return {Kind::EnsembleCovSpectralNorm, 1, false};
  }
  static MeasureKind ensemble_cov_softmax() {
    return {Kind::EnsembleCovSpectralNorm, 1, true};
  }
  static MeasureKind external_prob_entropy() {
    return {Kind::ExternalProbEntropy, 1, false};
  }

  bool operator==(const MeasureKind&) const = default;
};

// Canonical snake_case name used in JSON documents and on the CLI
// (kebab-case is accepted on input).
std::string measure_name(const MeasureKind& measure);
MeasureKind measure_from_name(const std::string& name);

// Low uncertainty means high confidence for every measure except Pmax.
Direction default_direction(const MeasureKind& measure);

// Numerically safe softmax (max-subtracted). Components are positive and
// sum to 1 within 1e-12.
std::vector<double> softmax(const std::vector<double>& scores);

// Largest softmax probability.
double pmax(const PredictionRecord& record);

// Natural-log entropy of a probability vector; 0 log 0 is taken as 0.
double entropy(const std::vector<double>& probs);

// -log of the sum of the k largest softmax probabilities (k = K gives 0).
double neg_log_topk_sum(const PredictionRecord& record, int k);

// Spectral norm of the K x K population covariance (divide by M) of the
// ensemble output vectors. Power iteration to relative tolerance 1e-10;
// throws ConvergenceFailure past the iteration cap.
double ensemble_cov_spectral_norm(const PredictionRecord& record);

// 1 iff true_label is among the k highest-scoring indices. Ties rank the
// lower index first.
int topk_event(const PredictionRecord& record, int k);

// Evaluate the measure on one record.
double measure_value(const PredictionRecord& record, const MeasureKind& measure);

// Reduce records to a (U(x), Top_k(x)) series with the measure's default
// direction (overridable for nonstandard setups).
EventSeries build_event_series(const std::vector<PredictionRecord>& records,
                               const MeasureKind& measure, int event_k);
EventSeries build_event_series(const std::vector<PredictionRecord>& records,
                               const MeasureKind& measure, int event_k,
                               Direction direction);

}  // namespace topbin
