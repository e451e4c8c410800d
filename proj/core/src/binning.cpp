#include "topbin/binning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace topbin {

QuantileEdges quantile_edges(const std::vector<double>& uncertainties,
                             std::size_t m_bins) {
  const std::size_t n = uncertainties.size();
  if (m_bins < 1) {
    throw Error(ErrorCode::InvalidArgument, "m_bins must be >= 1");
  }
  if (n < m_bins) {
    throw Error(ErrorCode::TooFewSamples,
                std::to_string(n) + " samples cannot fill " +
                    std::to_string(m_bins) + " bins");
  }

  std::vector<double> sorted = uncertainties;
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> interior;
  interior.reserve(m_bins - 1);
  for (std::size_t i = 1; i < m_bins; ++i) {
    // ceil(n*i/m) - 1, all quantities exact in integer arithmetic
    const std::size_t idx = (n * i + m_bins - 1) / m_bins - 1;
    interior.push_back(sorted[idx]);
  }
  interior.erase(std::unique(interior.begin(), interior.end()),
                 interior.end());
  // An interior edge at the maximum would leave the top bin empty.
  while (!interior.empty() && interior.back() >= sorted.back()) {
    interior.pop_back();
  }

  QuantileEdges result;
  result.merged = interior.size() + 1 != m_bins;
  result.edges.reserve(interior.size() + 2);
  result.edges.push_back(-std::numeric_limits<double>::infinity());
  result.edges.insert(result.edges.end(), interior.begin(), interior.end());
  result.edges.push_back(std::numeric_limits<double>::infinity());
  return result;
}

std::size_t assign_bin(double u, const std::vector<double>& edges) {
  // Bin i covers (edges[i], edges[i+1]]; find the first upper edge >= u.
  const auto first_upper = edges.begin() + 1;
  const auto it = std::lower_bound(first_upper, edges.end(), u);
  return static_cast<std::size_t>(it - first_upper);
}

namespace {

struct BinTallies {
  std::vector<std::size_t> counts;
  std::vector<std::size_t> hits;
};

BinTallies tally(const EventSeries& series, const std::vector<double>& edges) {
  const std::size_t bins = edges.size() - 1;
  BinTallies t;
  t.counts.assign(bins, 0);
  t.hits.assign(bins, 0);
  for (std::size_t j = 0; j < series.size(); ++j) {
    const std::size_t b = assign_bin(series.uncertainties[j], edges);
    ++t.counts[b];
    t.hits[b] += series.outcomes[j];
  }
  return t;
}

}  // namespace

BinModel fit_bin_model(const EventSeries& series, std::size_t m_bins,
                       bool regularize) {
  series.validate();
  auto quantiles = quantile_edges(series.uncertainties, m_bins);
  const std::size_t bins = quantiles.edges.size() - 1;
  const auto tallies = tally(series, quantiles.edges);

  BinModel model;
  model.edges = std::move(quantiles.edges);
  model.event_kind = series.event_kind;
  model.accuracy = series.accuracy();
  model.regularized = regularize;
  model.raw_probs.resize(bins);
  model.probs.resize(bins);
  model.weights.resize(bins);
  model.counts = tallies.counts;

  if (regularize && (model.accuracy <= 0.0 || model.accuracy >= 1.0)) {
    // The pseudo-observation at p_bar cannot pull a degenerate series off
    // the boundary, so no interior regularization exists.
    throw Error(ErrorCode::BoundaryProbability,
                "cannot regularize a series with accuracy " +
                    std::to_string(model.accuracy));
  }

  const double n = static_cast<double>(series.size());
  for (std::size_t i = 0; i < bins; ++i) {
    const double count = static_cast<double>(tallies.counts[i]);
    const double freq = static_cast<double>(tallies.hits[i]) / count;
    model.raw_probs[i] = freq;
    model.weights[i] = count / n;
    model.probs[i] =
        regularize ? (count * freq + model.accuracy) / (count + 1.0) : freq;
  }
  model.validate();
  return model;
}

BinModel evaluate_bin_model(const BinModel& model, const EventSeries& series) {
  series.validate();
  const std::size_t bins = model.bin_count();
  const auto tallies = tally(series, model.edges);

  BinModel test = model;
  test.regularized = false;
  test.accuracy = series.accuracy();
  test.counts = tallies.counts;
  const double n = static_cast<double>(series.size());
  for (std::size_t i = 0; i < bins; ++i) {
    if (tallies.counts[i] == 0) {
      // Unvisited bin: keep the training probability, contribute nothing.
      test.weights[i] = 0.0;
      test.probs[i] = model.probs[i];
      test.raw_probs[i] = model.probs[i];
      continue;
    }
    const double freq = static_cast<double>(tallies.hits[i]) /
                        static_cast<double>(tallies.counts[i]);
    test.weights[i] = static_cast<double>(tallies.counts[i]) / n;
    test.probs[i] = freq;
    test.raw_probs[i] = freq;
  }
  test.validate();
  return test;
}

double hoeffding_half_width(std::size_t count, double delta) {
  if (count < 1) {
    throw Error(ErrorCode::InvalidArgument, "count must be >= 1");
  }
  if (!(delta > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "delta must be positive");
  }
  const double log_term = std::log(2.0 / delta);
  if (log_term <= 0.0) return 0.0;  // delta >= 2 carries no constraint
  return std::sqrt(log_term / (2.0 * static_cast<double>(count)));
}

std::pair<double, ConfidenceInterval> predict(const BinModel& model, double u,
                                              double delta) {
  const std::size_t bin = assign_bin(u, model.edges);
  const double p = model.probs[bin];
  ConfidenceInterval interval;
  interval.center = p;
  interval.delta = delta;
  interval.half_width = hoeffding_half_width(model.counts[bin], delta);
  return {p, interval};
}

}  // namespace topbin
