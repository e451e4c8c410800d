#include "topbin/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "topbin/binning.hpp"
#include "topbin/rng.hpp"
#include "topbin/scoring.hpp"

namespace topbin {

EventSeries subset(const EventSeries& series,
                   std::span<const std::size_t> indices) {
  EventSeries out;
  out.event_kind = series.event_kind;
  out.direction = series.direction;
  out.uncertainties.reserve(indices.size());
  out.outcomes.reserve(indices.size());
  for (std::size_t idx : indices) {
    out.uncertainties.push_back(series.uncertainties[idx]);
    out.outcomes.push_back(series.outcomes[idx]);
  }
  return out;
}

std::pair<EventSeries, EventSeries> split_half(const EventSeries& series,
                                               std::uint64_t seed) {
  series.validate();
  const std::size_t n = series.size();
  if (n < 2) {
    throw Error(ErrorCode::TooFewSamples, "cannot split a series of size " +
                                              std::to_string(n));
  }
  const auto order = shuffled_indices(n, seed);
  const std::size_t calibration_size = (n + 1) / 2;
  std::span<const std::size_t> all(order);
  return {subset(series, all.subspan(0, calibration_size)),
          subset(series, all.subspan(calibration_size))};
}

std::vector<std::vector<std::size_t>> kfold_indices(std::size_t n,
                                                    std::size_t k,
                                                    std::uint64_t seed) {
  const auto order = shuffled_indices(n, seed);
  std::vector<std::vector<std::size_t>> folds(k);
  for (std::size_t pos = 0; pos < n; ++pos) {
    folds[pos % k].push_back(order[pos]);
  }
  return folds;
}

namespace {

// AUROC wants bins in ascending-confidence order; with a
// LowerMoreConfident measure the edge order descends in confidence.
double auroc_for_direction(const BinModel& model, Direction direction) {
  return direction == Direction::HigherMoreConfident
             ? auroc_binned(model)
             : auroc_binned(model.reversed());
}

}  // namespace

Scores score_pair(const BinModel& model, const EventSeries& test,
                  Direction direction) {
  Scores scores;
  const BinModel evaluated = evaluate_bin_model(model, test);
  scores.brier = brier(test, model);
  scores.ece = ece(evaluated, model);
  scores.brier_terms = brier_decomposition(test, model);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  try {
    scores.nll = nll(test, model);
    scores.nll_terms = nll_decomposition(test, model);
  } catch (const Error&) {
    scores.nll = nan;
    scores.nll_terms = {nan, nan, nan};
  }
  try {
    scores.eor = eor(model);
  } catch (const Error&) {
    scores.eor = nan;
  }
  try {
    scores.auroc = auroc_for_direction(model, direction);
  } catch (const Error&) {
    scores.auroc = nan;
  }
  return scores;
}

namespace {

Scores fold_mean(const std::vector<Scores>& folds) {
  Scores mean;
  const double n = static_cast<double>(folds.size());
  auto accumulate = [&](auto member) {
    double total = 0.0;
    for (const auto& f : folds) total += f.*member;
    return total / n;
  };
  mean.brier = accumulate(&Scores::brier);
  mean.nll = accumulate(&Scores::nll);
  mean.ece = accumulate(&Scores::ece);
  mean.eor = accumulate(&Scores::eor);
  mean.auroc = accumulate(&Scores::auroc);
  auto accumulate_terms = [&](auto terms_member, auto member) {
    double total = 0.0;
    for (const auto& f : folds) total += (f.*terms_member).*member;
    return total / n;
  };
  for (auto terms : {&Scores::brier_terms, &Scores::nll_terms}) {
    ScoreTerms& out = mean.*terms;
    out.uncertainty = accumulate_terms(terms, &ScoreTerms::uncertainty);
    out.resolution = accumulate_terms(terms, &ScoreTerms::resolution);
    out.calibration_error =
        accumulate_terms(terms, &ScoreTerms::calibration_error);
  }
  return mean;
}

Scores fold_std(const std::vector<Scores>& folds, const Scores& mean) {
  Scores out;
  const double denom = static_cast<double>(folds.size()) - 1.0;
  auto deviation = [&](auto member) {
    if (denom <= 0.0) return 0.0;
    double total = 0.0;
    for (const auto& f : folds) {
      const double d = f.*member - mean.*member;
      total += d * d;
    }
    return std::sqrt(total / denom);
  };
  out.brier = deviation(&Scores::brier);
  out.nll = deviation(&Scores::nll);
  out.ece = deviation(&Scores::ece);
  out.eor = deviation(&Scores::eor);
  out.auroc = deviation(&Scores::auroc);
  auto term_deviation = [&](auto terms_member, auto member) {
    if (denom <= 0.0) return 0.0;
    double total = 0.0;
    for (const auto& f : folds) {
      const double d =
          (f.*terms_member).*member - (mean.*terms_member).*member;
      total += d * d;
    }
    return std::sqrt(total / denom);
  };
  for (auto terms : {&Scores::brier_terms, &Scores::nll_terms}) {
    ScoreTerms& t = out.*terms;
    t.uncertainty = term_deviation(terms, &ScoreTerms::uncertainty);
    t.resolution = term_deviation(terms, &ScoreTerms::resolution);
    t.calibration_error = term_deviation(terms, &ScoreTerms::calibration_error);
  }
  return out;
}

}  // namespace

ScoreReport kfold_report(const EventSeries& series, std::size_t k,
                         std::size_t m_bins, std::uint64_t seed,
                         bool regularize) {
  series.validate();
  const std::size_t n = series.size();
  if (k < 2 || n < k * m_bins) {
    throw Error(ErrorCode::TooFewSamples,
                "k-fold needs k >= 2 and N >= k * m_bins (got N = " +
                    std::to_string(n) + ", k = " + std::to_string(k) +
                    ", m_bins = " + std::to_string(m_bins) + ")");
  }
  const auto folds = kfold_indices(n, k, seed);

  ScoreReport report;
  report.folds.reserve(k);
  for (std::size_t f = 0; f < k; ++f) {
    std::vector<std::size_t> train_indices;
    train_indices.reserve(n - folds[f].size());
    for (std::size_t other = 0; other < k; ++other) {
      if (other == f) continue;
      train_indices.insert(train_indices.end(), folds[other].begin(),
                           folds[other].end());
    }
    const EventSeries train = subset(series, train_indices);
    const EventSeries test = subset(series, folds[f]);
    const BinModel model = fit_bin_model(train, m_bins, regularize);
    report.folds.push_back(score_pair(model, test, series.direction));
  }
  report.mean = fold_mean(report.folds);
  report.std_dev = fold_std(report.folds, *report.mean);
  report.overall = *report.mean;
  return report;
}

namespace {

std::vector<Suspect> flag_impl(std::span<const std::string> ids,
                               const EventSeries& series,
                               const BinModel& model, std::size_t top_bins) {
  // Rank bins by fitted probability, most confident first.
  std::vector<std::size_t> order(model.bin_count());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (model.probs[a] != model.probs[b]) {
      return model.probs[a] > model.probs[b];
    }
    return a < b;
  });
  const std::size_t keep = std::min(top_bins, order.size());
  std::vector<char> selected(model.bin_count(), 0);
  for (std::size_t r = 0; r < keep; ++r) selected[order[r]] = 1;

  std::vector<Suspect> suspects;
  for (std::size_t j = 0; j < series.size(); ++j) {
    if (series.outcomes[j] != 0) continue;
    const std::size_t bin = assign_bin(series.uncertainties[j], model.edges);
    if (!selected[bin]) continue;
    suspects.push_back({ids[j], bin, model.probs[bin]});
  }
  std::sort(suspects.begin(), suspects.end(),
            [](const Suspect& a, const Suspect& b) {
              if (a.prob != b.prob) return a.prob > b.prob;
              return a.sample_id < b.sample_id;
            });
  return suspects;
}

}  // namespace

std::vector<Suspect> flag_suspect_labels(
    const std::vector<PredictionRecord>& records, const BinModel& model,
    const MeasureKind& measure, std::size_t top_bins) {
  const EventSeries series = build_event_series(records, measure, 1);
  std::vector<std::string> ids;
  ids.reserve(records.size());
  for (const auto& record : records) ids.push_back(record.sample_id);
  return flag_impl(ids, series, model, top_bins);
}

std::vector<Suspect> flag_suspects_in_series(std::span<const std::string> ids,
                                             const EventSeries& series,
                                             const BinModel& model,
                                             std::size_t top_bins) {
  if (ids.size() != series.size()) {
    throw Error(ErrorCode::InvalidArgument,
                "id list and series lengths disagree");
  }
  return flag_impl(ids, series, model, top_bins);
}

}  // namespace topbin
