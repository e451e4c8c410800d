#include "topbin/measures.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <numeric>

namespace topbin {

std::string measure_name(const MeasureKind& measure) {
  switch (measure.kind) {
    case MeasureKind::Kind::Pmax: return "pmax";
    case MeasureKind::Kind::NegLogPmax: return "neg_log_pmax";
    case MeasureKind::Kind::Entropy: return "entropy";
    case MeasureKind::Kind::NegLogTopKSum:
      return "neg_log_top" + std::to_string(measure.k) + "_sum";
    case MeasureKind::Kind::EnsembleCovSpectralNorm:
      return measure.softmax_members ? "ensemble_cov_spectral_norm_softmax"
                                     : "ensemble_cov_spectral_norm";
    case MeasureKind::Kind::ExternalProbEntropy:
      return "external_prob_entropy";
  }
  return "pmax";
}

MeasureKind measure_from_name(const std::string& name) {
  std::string canon = name;
  std::replace(canon.begin(), canon.end(), '-', '_');
  if (canon == "pmax") return MeasureKind::pmax();
  if (canon == "neg_log_pmax") return MeasureKind::neg_log_pmax();
  if (canon == "entropy") return MeasureKind::entropy();
  if (canon == "ensemble_cov_spectral_norm" || canon == "ensemble_cov") {
    return MeasureKind::ensemble_cov();
  }
  if (canon == "ensemble_cov_spectral_norm_softmax" ||
      canon == "ensemble_cov_softmax") {
    return MeasureKind::ensemble_cov_softmax();
  }
  if (canon == "external_prob_entropy") {
    return MeasureKind::external_prob_entropy();
  }
  // neg_log_top{k}_sum
  const std::string prefix = "neg_log_top";
  const std::string suffix = "_sum";
  if (canon.size() > prefix.size() + suffix.size() &&
      canon.compare(0, prefix.size(), prefix) == 0 &&
      canon.compare(canon.size() - suffix.size(), suffix.size(), suffix) == 0) {
    const char* digits = canon.c_str() + prefix.size();
    const char* digits_end = canon.c_str() + canon.size() - suffix.size();
    int k = 0;
    const auto [ptr, ec] = std::from_chars(digits, digits_end, k);
    if (ec == std::errc() && ptr == digits_end && k >= 1) {
      return MeasureKind::neg_log_topk_sum(k);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown measure '" + name + "'");
}

Direction default_direction(const MeasureKind& measure) {
  return measure.kind == MeasureKind::Kind::Pmax
             ? Direction::HigherMoreConfident
             : Direction::LowerMoreConfident;
}

std::vector<double> softmax(const std::vector<double>& scores) {
  const double peak = *std::max_element(scores.begin(), scores.end());
  std::vector<double> probs(scores.size());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    probs[i] = std::exp(scores[i] - peak);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

double pmax(const PredictionRecord& record) {
  const auto probs = softmax(record.scores);
  return *std::max_element(probs.begin(), probs.end());
}

double entropy(const std::vector<double>& probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return std::max(h, 0.0);
}

double neg_log_topk_sum(const PredictionRecord& record, int k) {
  const auto probs = softmax(record.scores);
  const int classes = static_cast<int>(probs.size());
  if (k < 1 || k > classes) {
    throw Error(ErrorCode::InvalidArgument,
                "k = " + std::to_string(k) + " outside [1, K]");
  }
  if (k == classes) return 0.0;  // whole distribution sums to 1
  std::vector<double> sorted = probs;
  std::partial_sort(sorted.begin(), sorted.begin() + k, sorted.end(),
                    std::greater<double>());
  double top = 0.0;
  for (int i = 0; i < k; ++i) top += sorted[i];
  return -std::log(std::min(top, 1.0));
}

namespace {

// Largest eigenvalue of a symmetric PSD matrix by power iteration.
// Rayleigh quotients must stabilize to the relative tolerance.
double power_iteration_max_eigenvalue(const std::vector<double>& matrix,
                                      std::size_t dim, double rel_tol,
                                      std::size_t max_iters) {
  double scale = 0.0;
  for (double v : matrix) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;

  // Deterministic, not axis-aligned start so no eigenvector is missed.
  std::vector<double> vec(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    vec[i] = 1.0 + static_cast<double>(i % 7) * 0.125;
  }
  std::vector<double> product(dim);

  double lambda = 0.0;
  for (std::size_t iter = 0; iter < max_iters; ++iter) {
    for (std::size_t r = 0; r < dim; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        acc += matrix[r * dim + c] * vec[c];
      }
      product[r] = acc;
    }
    double norm = 0.0;
    for (double v : product) norm += v * v;
    norm = std::sqrt(norm);
    if (norm <= scale * 1e-300) {
      // Start vector fell in the null space; nudge and continue.
      for (std::size_t i = 0; i < dim; ++i) {
        vec[i] = (i == iter % dim) ? 1.0 : 0.0;
      }
      continue;
    }
    for (double& v : product) v /= norm;
    // Rayleigh quotient v'Av with the normalized iterate.
    double next_lambda = 0.0;
    for (std::size_t r = 0; r < dim; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        acc += matrix[r * dim + c] * product[c];
      }
      next_lambda += product[r] * acc;
    }
    vec.swap(product);
    if (iter > 0 &&
        std::abs(next_lambda - lambda) <= rel_tol * std::max(std::abs(next_lambda), scale * 1e-12)) {
      return next_lambda;
    }
    lambda = next_lambda;
  }
  throw Error(ErrorCode::ConvergenceFailure,
              "power iteration did not reach tolerance " +
                  std::to_string(rel_tol));
}

double cov_spectral_norm_of(const std::vector<std::vector<double>>& members,
                            std::size_t dim) {
  const std::size_t m = members.size();

  std::vector<double> mean(dim, 0.0);
  for (const auto& member : members) {
    for (std::size_t i = 0; i < dim; ++i) mean[i] += member[i];
  }
  for (double& v : mean) v /= static_cast<double>(m);

  // Population covariance (divide by M).
  std::vector<double> cov(dim * dim, 0.0);
  for (const auto& member : members) {
    for (std::size_t r = 0; r < dim; ++r) {
      const double dr = member[r] - mean[r];
      for (std::size_t c = r; c < dim; ++c) {
        cov[r * dim + c] += dr * (member[c] - mean[c]);
      }
    }
  }
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = r; c < dim; ++c) {
      const double v = cov[r * dim + c] / static_cast<double>(m);
      cov[r * dim + c] = v;
      cov[c * dim + r] = v;
    }
  }

  if (dim == 1) return std::abs(cov[0]);
  return power_iteration_max_eigenvalue(cov, dim, 1e-10, 50000);
}

}  // namespace

double ensemble_cov_spectral_norm(const PredictionRecord& record) {
  if (!record.ensemble_scores || record.ensemble_scores->size() < 2) {
    throw Error(ErrorCode::RaggedEnsemble,
                "sample " + record.sample_id +
                    ": ensemble covariance needs at least 2 members");
  }
  return cov_spectral_norm_of(*record.ensemble_scores, record.scores.size());
}

int topk_event(const PredictionRecord& record, int k) {
  const int classes = static_cast<int>(record.scores.size());
  if (k < 1 || k > classes) {
    throw Error(ErrorCode::InvalidArgument,
                "k = " + std::to_string(k) + " outside [1, K]");
  }
  const int label = record.true_label;
  const double label_score = record.scores[static_cast<std::size_t>(label)];
  // Rank of the true label under (score desc, index asc).
  int ahead = 0;
  for (int i = 0; i < classes; ++i) {
    if (i == label) continue;
    const double s = record.scores[static_cast<std::size_t>(i)];
    if (s > label_score || (s == label_score && i < label)) ++ahead;
  }
  return ahead < k ? 1 : 0;
}

double measure_value(const PredictionRecord& record,
                     const MeasureKind& measure) {
  switch (measure.kind) {
    case MeasureKind::Kind::Pmax:
      return pmax(record);
    case MeasureKind::Kind::NegLogPmax:
      return neg_log_topk_sum(record, 1);
    case MeasureKind::Kind::Entropy:
      return entropy(softmax(record.scores));
    case MeasureKind::Kind::NegLogTopKSum:
      return neg_log_topk_sum(record, measure.k);
    case MeasureKind::Kind::EnsembleCovSpectralNorm: {
      if (!measure.softmax_members) return ensemble_cov_spectral_norm(record);
      if (!record.ensemble_scores || record.ensemble_scores->size() < 2) {
        throw Error(ErrorCode::RaggedEnsemble,
                    "sample " + record.sample_id +
                        ": ensemble covariance needs at least 2 members");
      }
      PredictionRecord probabilities = record;
      for (auto& member : *probabilities.ensemble_scores) {
        member = softmax(member);
      }
      return ensemble_cov_spectral_norm(probabilities);
    }
    case MeasureKind::Kind::ExternalProbEntropy: {
      // Scores already hold an externally supplied probability vector
      // (e.g. human annotation frequencies).
      double total = 0.0;
      for (double p : record.scores) {
        if (p < 0.0) {
          throw Error(ErrorCode::InvalidArgument,
                      "sample " + record.sample_id +
                          ": negative external probability");
        }
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-6) {
        throw Error(ErrorCode::InvalidArgument,
                    "sample " + record.sample_id +
                        ": external probabilities sum to " +
                        std::to_string(total));
      }
      return entropy(record.scores);
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unhandled measure");
}

EventSeries build_event_series(const std::vector<PredictionRecord>& records,
                               const MeasureKind& measure, int event_k,
                               Direction direction) {
  validate_records(records);
  EventSeries series;
  series.event_kind = EventKind{event_k};
  series.direction = direction;
  series.uncertainties.reserve(records.size());
  series.outcomes.reserve(records.size());
  for (const auto& record : records) {
    series.uncertainties.push_back(measure_value(record, measure));
    series.outcomes.push_back(
        static_cast<std::uint8_t>(topk_event(record, event_k)));
  }
  series.validate();
  return series;
}

EventSeries build_event_series(const std::vector<PredictionRecord>& records,
                               const MeasureKind& measure, int event_k) {
  return build_event_series(records, measure, event_k,
                            default_direction(measure));
}

}  // namespace topbin
