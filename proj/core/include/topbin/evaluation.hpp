#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "topbin/measures.hpp"
#include "topbin/types.hpp"

namespace topbin {

// Deterministic shuffled split into ceil(N/2) calibration and floor(N/2)
// evaluation samples.
std::pair<EventSeries, EventSeries> split_half(const EventSeries& series,
                                               std::uint64_t seed);

// k disjoint, exhaustive folds with sizes differing by at most one.
// Returned as index lists into the series, in shuffled order.
std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n, std::size_t k,
                                                    std::uint64_t seed);

EventSeries subset(const EventSeries& series,
                   std::span<const std::size_t> indices);

// Score one (model, held-out series) pair. NLL/EOR come out NaN when the
// model holds boundary probabilities (unregularized degenerate bins).
Scores score_pair(const BinModel& model, const EventSeries& test,
                  Direction direction);

// Cross-validate: per fold, fit on the other k-1 folds (edges recomputed
// per fold) and score on the held-out one. mean / std_dev aggregate the
// fold scores; std is the sample (n-1) deviation.
ScoreReport kfold_report(const EventSeries& series, std::size_t k,
                         std::size_t m_bins, std::uint64_t seed,
                         bool regularize = true);

struct Suspect {
  std::string sample_id;
  std::size_t bin = 0;
  double prob = 0.0;
};

// Samples landing in the top_bins most-confident bins (by fitted
// probability) whose Top-1 outcome is 0: likely mislabeled or ambiguous.
// Sorted by bin probability descending, then sample_id.
std::vector<Suspect> flag_suspect_labels(
    const std::vector<PredictionRecord>& records, const BinModel& model,
    const MeasureKind& measure, std::size_t top_bins);

// Same on a pre-built series with external ids (scalar ingestion path).
std::vector<Suspect> flag_suspects_in_series(std::span<const std::string> ids,
                                             const EventSeries& series,
                                             const BinModel& model,
                                             std::size_t top_bins);

}  // namespace topbin
