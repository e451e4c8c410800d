#include "topbin/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace topbin {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteScore: return "NonFiniteScore";
    case ErrorCode::LabelOutOfRange: return "LabelOutOfRange";
    case ErrorCode::RaggedEnsemble: return "RaggedEnsemble";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::InteriorProbRequired: return "InteriorProbRequired";
    case ErrorCode::BoundaryProbability: return "BoundaryProbability";
    case ErrorCode::EdgeMismatch: return "EdgeMismatch";
    case ErrorCode::DegenerateClasses: return "DegenerateClasses";
  }
  return "UnknownError";
}

bool is_data_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonFiniteScore:
    case ErrorCode::LabelOutOfRange:
    case ErrorCode::RaggedEnsemble:
    case ErrorCode::TooFewSamples:
    case ErrorCode::ParseError:
    case ErrorCode::SchemaError:
    case ErrorCode::InvalidArgument:
      return true;
    default:
      return false;
  }
}

const std::vector<PredictionRecord>& validate_records(
    const std::vector<PredictionRecord>& records) {
  for (const auto& record : records) {
    if (record.scores.size() < 2) {
      throw Error(ErrorCode::NonFiniteScore,
                  "sample " + record.sample_id + ": needs at least 2 classes");
    }
    for (double s : record.scores) {
      if (!std::isfinite(s)) {
        throw Error(ErrorCode::NonFiniteScore,
                    "sample " + record.sample_id + " has a non-finite score");
      }
    }
    if (record.true_label < 0 ||
        static_cast<std::size_t>(record.true_label) >= record.scores.size()) {
      throw Error(ErrorCode::LabelOutOfRange,
                  "sample " + record.sample_id + ": label " +
                      std::to_string(record.true_label) + " not in [0, " +
                      std::to_string(record.scores.size()) + ")");
    }
    if (record.ensemble_scores) {
      const auto& members = *record.ensemble_scores;
      if (members.size() < 2) {
        throw Error(ErrorCode::RaggedEnsemble,
                    "sample " + record.sample_id +
                        ": ensemble needs at least 2 members");
      }
      for (const auto& member : members) {
        if (member.size() != record.scores.size()) {
          throw Error(ErrorCode::RaggedEnsemble,
                      "sample " + record.sample_id +
                          ": ensemble member of length " +
                          std::to_string(member.size()) + ", expected " +
                          std::to_string(record.scores.size()));
        }
        for (double s : member) {
          if (!std::isfinite(s)) {
            throw Error(ErrorCode::NonFiniteScore,
                        "sample " + record.sample_id +
                            " has a non-finite ensemble score");
          }
        }
      }
    }
  }
  return records;
}

double EventSeries::accuracy() const {
  if (outcomes.empty()) return 0.0;
  std::size_t hits = 0;
  for (auto o : outcomes) hits += o;
  return static_cast<double>(hits) / static_cast<double>(outcomes.size());
}

void EventSeries::validate() const {
  if (uncertainties.size() != outcomes.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "series has " + std::to_string(uncertainties.size()) +
                    " uncertainties but " + std::to_string(outcomes.size()) +
                    " outcomes");
  }
  if (uncertainties.empty()) {
    throw Error(ErrorCode::TooFewSamples, "series is empty");
  }
  for (double u : uncertainties) {
    if (!std::isfinite(u)) {
      throw Error(ErrorCode::NonFiniteScore, "non-finite uncertainty value");
    }
  }
  for (auto o : outcomes) {
    if (o != 0 && o != 1) {
      throw Error(ErrorCode::InvalidArgument, "outcome not in {0,1}");
    }
  }
  if (event_kind.k < 1) {
    throw Error(ErrorCode::InvalidArgument, "event k must be >= 1");
  }
}

std::vector<std::size_t> BinModel::zero_count_bins() const {
  std::vector<std::size_t> zeros;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) zeros.push_back(i);
  }
  return zeros;
}

void BinModel::validate() const {
  const std::size_t bins = probs.size();
  if (bins == 0) {
    throw Error(ErrorCode::InvalidArgument, "model has no bins");
  }
  if (edges.size() != bins + 1 || weights.size() != bins ||
      raw_probs.size() != bins || counts.size() != bins) {
    throw Error(ErrorCode::InvalidArgument, "model field sizes disagree");
  }
  if (edges.front() != -std::numeric_limits<double>::infinity() ||
      edges.back() != std::numeric_limits<double>::infinity()) {
    throw Error(ErrorCode::InvalidArgument, "edges must start -inf, end +inf");
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i - 1] < edges[i])) {
      throw Error(ErrorCode::InvalidArgument, "edges not strictly increasing");
    }
  }
  double weight_sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw Error(ErrorCode::InvalidArgument, "negative weight");
    weight_sum += w;
  }
  if (std::abs(weight_sum - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "weights sum to " +
                                                std::to_string(weight_sum) +
                                                ", expected 1");
  }
  for (std::size_t i = 0; i < bins; ++i) {
    if (!(probs[i] >= 0.0 && probs[i] <= 1.0) ||
        !(raw_probs[i] >= 0.0 && raw_probs[i] <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "bin probability outside [0,1]");
    }
    if (regularized && (probs[i] <= 0.0 || probs[i] >= 1.0)) {
      throw Error(ErrorCode::BoundaryProbability,
                  "regularized model holds a boundary probability");
    }
  }
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "accuracy outside [0,1]");
  }
}

BinModel BinModel::from_histogram(std::vector<double> probs,
                                  std::vector<double> weights,
                                  std::optional<double> accuracy) {
  if (probs.empty() || probs.size() != weights.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "histogram needs matching, non-empty probs and weights");
  }
  BinModel model;
  const std::size_t bins = probs.size();
  model.edges.resize(bins + 1);
  model.edges.front() = -std::numeric_limits<double>::infinity();
  model.edges.back() = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < bins; ++i) {
    model.edges[i] = static_cast<double>(i);
  }
  model.raw_probs = probs;
  model.probs = std::move(probs);
  model.weights = std::move(weights);
  model.counts.assign(bins, 0);
  if (accuracy) {
    model.accuracy = *accuracy;
  } else {
    double mean = 0.0;
    for (std::size_t i = 0; i < bins; ++i) {
      mean += model.weights[i] * model.probs[i];
    }
    model.accuracy = mean;
  }
  model.validate();
  return model;
}

BinModel BinModel::reversed() const {
  BinModel out = *this;
  std::reverse(out.probs.begin(), out.probs.end());
  std::reverse(out.raw_probs.begin(), out.raw_probs.end());
  std::reverse(out.weights.begin(), out.weights.end());
  std::reverse(out.counts.begin(), out.counts.end());
  // Mirror the axis (u -> -u) so edges keep pairing with their bins.
  for (std::size_t i = 0; i < edges.size(); ++i) {
    out.edges[i] = -edges[edges.size() - 1 - i];
  }
  return out;
}

double ConfidenceInterval::lower() const {
  return std::max(0.0, center - half_width);
}

double ConfidenceInterval::upper() const {
  return std::min(1.0, center + half_width);
}

}  // namespace topbin
