#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "topbin/types.hpp"

namespace topbin {

struct QuantileEdges {
  std::vector<double> edges;  // m+1 values, first -inf, last +inf
  bool merged = false;        // fewer bins than requested (duplicate values)
};

// Equal-mass bin edges from training quantiles. Interior edge i is the
// sorted value at index ceil(N*i/m_bins) - 1; duplicates (and edges equal
// to the maximum) are dropped so no training bin is empty.
QuantileEdges quantile_edges(const std::vector<double>& uncertainties,
                             std::size_t m_bins);

// Index of the unique bin with e_i < u <= e_{i+1} (binary search).
std::size_t assign_bin(double u, const std::vector<double>& edges);

// Fit the calibrator: quantile edges, per-bin empirical frequencies and
// weights. With regularize, each bin gains one pseudo-observation at the
// series accuracy, keeping probabilities strictly interior.
BinModel fit_bin_model(const EventSeries& series, std::size_t m_bins,
                       bool regularize);

// Re-estimate probabilities/weights/counts on a test series over the fitted
// edges. Bins the test series never hits keep the training probability with
// weight zero (see BinModel::zero_count_bins).
BinModel evaluate_bin_model(const BinModel& model, const EventSeries& series);

// sqrt(ln(2/delta) / (2 * count)); distribution-free two-sided bound for a
// Bernoulli mean.
double hoeffding_half_width(std::size_t count, double delta);

// Calibrated probability for uncertainty value u plus its Hoeffding
// interval at confidence 1 - delta.
std::pair<double, ConfidenceInterval> predict(const BinModel& model, double u,
                                              double delta);

}  // namespace topbin
