#pragma once

#include "topbin/types.hpp"

namespace topbin {

// Mean squared gap between the predicted bin probability and the outcome.
double brier(const EventSeries& series, const BinModel& model);

// Mean binary negative log-likelihood. Requires every bin probability the
// series actually uses to be strictly interior (fit with regularization).
double nll(const EventSeries& series, const BinModel& model);

// Expected calibration error between two histograms over the same edges:
// sum_i w_test,i * |p_test,i - p_train,i|.
double ece(const BinModel& test, const BinModel& train);

// Odds of p.
double odds(double p);

// max(O(p)/O(a), O(a)/O(p)), always >= 1. Throws BoundaryProbability
// unless both arguments are strictly interior.
double odds_ratio(double p, double a);

// Expected odds ratio of the histogram against its own accuracy:
// sum_i w_i * OR(p_i, p_bar). Equals 1 iff every bin matches the accuracy.
double eor(const BinModel& model);

// Murphy split of the Brier score against observed test frequencies:
//   uncertainty  = p_bar (1 - p_bar)          [test accuracy]
//   resolution   = sum w_i (p_bar - o_i)^2
//   calibration  = sum w_i (p_i - o_i)^2
// The terms recombine to brier() exactly up to floating-point error.
ScoreTerms brier_decomposition(const EventSeries& test_series,
                               const BinModel& model);

// Same split for NLL with binary entropy / KL divergence:
//   uncertainty  = H(p_bar)
//   resolution   = sum w_i KL(o_i || p_bar)
//   calibration  = sum w_i KL(o_i || p_i)
// Orientation is pinned by requiring exact recombination with nll().
ScoreTerms nll_decomposition(const EventSeries& test_series,
                             const BinModel& model);

// Mann-Whitney statistic over the bins in stored order, ties counting 1/2:
// with P_i = w_i p_i and N_i = w_i (1 - p_i),
//   AUROC = [sum_i P_i (sum_{j<i} N_j) + 1/2 sum_i P_i N_i] / (sum P)(sum N).
// Throws DegenerateClasses when either class has zero mass.
double auroc_binned(const BinModel& model);

}  // namespace topbin
