#include "topbin/scoring.hpp"

#include <cmath>
#include <vector>

#include "topbin/binning.hpp"

namespace topbin {

namespace {

// Neumaier-compensated accumulator; the decomposition identities are
// asserted to 1e-12 relative, which plain summation only just meets.
struct KahanSum {
  double sum = 0.0;
  double compensation = 0.0;

  void add(double value) {
    const double t = sum + value;
    if (std::abs(sum) >= std::abs(value)) {
      compensation += (sum - t) + value;
    } else {
      compensation += (value - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + compensation; }
};

void require_same_edges(const BinModel& a, const BinModel& b) {
  if (a.edges != b.edges) {
    throw Error(ErrorCode::EdgeMismatch,
                "histograms were fitted on different edges");
  }
}

double interior_or_throw(double p, ErrorCode code) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(code, "probability " + std::to_string(p) +
                          " is not strictly inside (0,1)");
  }
  return p;
}

// Per-bin observed statistics of a series under the model's edges.
struct Observed {
  std::vector<double> weights;
  std::vector<double> freqs;
  double accuracy = 0.0;
};

Observed observe(const EventSeries& series, const BinModel& model) {
  series.validate();
  const std::size_t bins = model.bin_count();
  std::vector<std::size_t> counts(bins, 0);
  std::vector<std::size_t> hits(bins, 0);
  for (std::size_t j = 0; j < series.size(); ++j) {
    const std::size_t b = assign_bin(series.uncertainties[j], model.edges);
    ++counts[b];
    hits[b] += series.outcomes[j];
  }
  Observed obs;
  obs.weights.assign(bins, 0.0);
  obs.freqs.assign(bins, 0.0);
  const double n = static_cast<double>(series.size());
  for (std::size_t i = 0; i < bins; ++i) {
    if (counts[i] == 0) continue;
    obs.weights[i] = static_cast<double>(counts[i]) / n;
    obs.freqs[i] =
        static_cast<double>(hits[i]) / static_cast<double>(counts[i]);
  }
  obs.accuracy = series.accuracy();
  return obs;
}

double binary_entropy(double p) {
  double h = 0.0;
  if (p > 0.0) h -= p * std::log(p);
  if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
  return h;
}

// KL(q || p) for Bernoulli distributions; q may sit on the boundary,
// p must not.
double binary_kl(double q, double p) {
  double kl = 0.0;
  if (q > 0.0) kl += q * std::log(q / p);
  if (q < 1.0) kl += (1.0 - q) * std::log((1.0 - q) / (1.0 - p));
  return kl;
}

}  // namespace

double brier(const EventSeries& series, const BinModel& model) {
  series.validate();
  KahanSum total;
  for (std::size_t j = 0; j < series.size(); ++j) {
    const std::size_t b = assign_bin(series.uncertainties[j], model.edges);
    const double gap =
        model.probs[b] - static_cast<double>(series.outcomes[j]);
    total.add(gap * gap);
  }
  return total.value() / static_cast<double>(series.size());
}

double nll(const EventSeries& series, const BinModel& model) {
  series.validate();
  KahanSum total;
  for (std::size_t j = 0; j < series.size(); ++j) {
    const std::size_t b = assign_bin(series.uncertainties[j], model.edges);
    const double p =
        interior_or_throw(model.probs[b], ErrorCode::InteriorProbRequired);
    total.add(series.outcomes[j] ? -std::log(p) : -std::log(1.0 - p));
  }
  return total.value() / static_cast<double>(series.size());
}

double ece(const BinModel& test, const BinModel& train) {
  require_same_edges(test, train);
  double total = 0.0;
  for (std::size_t i = 0; i < test.bin_count(); ++i) {
    total += test.weights[i] * std::abs(test.probs[i] - train.probs[i]);
  }
  return total;
}

double odds(double p) { return p / (1.0 - p); }

double odds_ratio(double p, double a) {
  interior_or_throw(p, ErrorCode::BoundaryProbability);
  interior_or_throw(a, ErrorCode::BoundaryProbability);
  // Larger odds over smaller, so OR(p, a) == OR(a, p) exactly.
  const double op = odds(p);
  const double oa = odds(a);
  return std::max(op, oa) / std::min(op, oa);
}

double eor(const BinModel& model) {
  double total = 0.0;
  for (std::size_t i = 0; i < model.bin_count(); ++i) {
    total += model.weights[i] * odds_ratio(model.probs[i], model.accuracy);
  }
  return total;
}

ScoreTerms brier_decomposition(const EventSeries& test_series,
                               const BinModel& model) {
  const Observed obs = observe(test_series, model);
  ScoreTerms terms;
  terms.uncertainty = obs.accuracy * (1.0 - obs.accuracy);
  KahanSum resolution;
  KahanSum calibration;
  for (std::size_t i = 0; i < model.bin_count(); ++i) {
    if (obs.weights[i] == 0.0) continue;
    const double spread = obs.accuracy - obs.freqs[i];
    resolution.add(obs.weights[i] * spread * spread);
    const double gap = model.probs[i] - obs.freqs[i];
    calibration.add(obs.weights[i] * gap * gap);
  }
  terms.resolution = resolution.value();
  terms.calibration_error = calibration.value();
  return terms;
}

ScoreTerms nll_decomposition(const EventSeries& test_series,
                             const BinModel& model) {
  const Observed obs = observe(test_series, model);
  const double acc =
      interior_or_throw(obs.accuracy, ErrorCode::BoundaryProbability);
  ScoreTerms terms;
  terms.uncertainty = binary_entropy(acc);
  KahanSum resolution;
  KahanSum calibration;
  for (std::size_t i = 0; i < model.bin_count(); ++i) {
    if (obs.weights[i] == 0.0) continue;
    const double p =
        interior_or_throw(model.probs[i], ErrorCode::BoundaryProbability);
    resolution.add(obs.weights[i] * binary_kl(obs.freqs[i], acc));
    calibration.add(obs.weights[i] * binary_kl(obs.freqs[i], p));
  }
  terms.resolution = resolution.value();
  terms.calibration_error = calibration.value();
  return terms;
}

double auroc_binned(const BinModel& model) {
  KahanSum numerator;
  double positives = 0.0;
  double negatives = 0.0;
  double negatives_before = 0.0;
  for (std::size_t i = 0; i < model.bin_count(); ++i) {
    const double pos = model.weights[i] * model.probs[i];
    const double neg = model.weights[i] * (1.0 - model.probs[i]);
    numerator.add(pos * negatives_before + 0.5 * pos * neg);
    negatives_before += neg;
    positives += pos;
    negatives += neg;
  }
  if (positives <= 0.0 || negatives <= 0.0) {
    throw Error(ErrorCode::DegenerateClasses,
                "histogram holds a single outcome class");
  }
  return numerator.value() / (positives * negatives);
}

}  // namespace topbin
