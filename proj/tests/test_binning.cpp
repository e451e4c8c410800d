#include <doctest.h>

#include <cmath>
#include <limits>

#include "support.hpp"
#include "topbin/binning.hpp"
#include "topbin/evaluation.hpp"
#include "topbin/rng.hpp"
#include "topbin/scoring.hpp"

using namespace topbin;

TEST_SUITE("binning") {

TEST_CASE("quantile edges on 1..10 with two bins split at 5") {
  const std::vector<double> values = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  const auto result = quantile_edges(values, 2);
  REQUIRE(result.edges.size() == 3);
  CHECK(result.edges[0] == -std::numeric_limits<double>::infinity());
  CHECK(result.edges[1] == 5.0);
  CHECK(result.edges[2] == std::numeric_limits<double>::infinity());
  CHECK_FALSE(result.merged);

  std::size_t low = 0;
  for (double v : values) {
    if (assign_bin(v, result.edges) == 0) ++low;
  }
  CHECK(low == 5);
}

TEST_CASE("one bin spans the whole line") {
  const auto result = quantile_edges({3.0, 1.0, 2.0}, 1);
  REQUIRE(result.edges.size() == 2);
  CHECK(result.edges[0] == -std::numeric_limits<double>::infinity());
  CHECK(result.edges[1] == std::numeric_limits<double>::infinity());
}

TEST_CASE("all-equal values merge to a single reported bin") {
  const std::vector<double> values(12, 7.5);
  const auto result = quantile_edges(values, 4);
  CHECK(result.merged);
  REQUIRE(result.edges.size() == 2);

  const auto series = [&] {
    EventSeries s;
    s.uncertainties = values;
    s.outcomes.assign(values.size(), 0);
    s.outcomes[0] = 1;
    return s;
  }();
  const auto model = fit_bin_model(series, 4, false);
  CHECK(model.bin_count() == 1);
  CHECK(model.counts[0] == 12);
}

TEST_CASE("too few samples for the requested bins") {
  CHECK_THROWS_AS(quantile_edges({1.0, 2.0}, 3), Error);
}

TEST_CASE("interior edge values fall in the lower bin") {
  const std::vector<double> edges = {
      -std::numeric_limits<double>::infinity(), 1.0, 2.0,
      std::numeric_limits<double>::infinity()};
  CHECK(assign_bin(1.0, edges) == 0);
  CHECK(assign_bin(2.0, edges) == 1);
  CHECK(assign_bin(0.5, edges) == 0);
  CHECK(assign_bin(-1e308, edges) == 0);
  CHECK(assign_bin(2.5, edges) == 2);
  CHECK(assign_bin(1e308, edges) == 2);
}

TEST_CASE("binary search agrees with a linear scan on 10^4 points") {
  SplitMix64 rng(41);
  std::vector<double> values(300);
  for (double& v : values) v = rng.next_double() * 100.0;
  const auto edges = quantile_edges(values, 15).edges;
  for (int trial = 0; trial < 10000; ++trial) {
    const double u = rng.next_double() * 140.0 - 20.0;
    CHECK(assign_bin(u, edges) == testsupport::linear_scan_bin(u, edges));
  }
  // Edge values themselves.
  for (double e : edges) {
    if (std::isinf(e)) continue;
    CHECK(assign_bin(e, edges) == testsupport::linear_scan_bin(e, edges));
  }
}

TEST_CASE("coin-toss fit recovers the exact histogram") {
  const auto series = testsupport::make_coin_series();
  const auto model = fit_bin_model(series, 4, false);
  REQUIRE(model.bin_count() == 4);
  CHECK(model.probs[0] == 0.5);
  CHECK(model.probs[1] == 0.5);
  CHECK(model.probs[2] == 15.0 / 16.0);
  CHECK(model.probs[3] == 1.0 / 16.0);
  for (double w : model.weights) CHECK(w == 0.25);
  CHECK(model.accuracy == 0.5);
  CHECK(model.edges[1] == 1.0);
  CHECK(model.edges[2] == 2.0);
  CHECK(model.edges[3] == 3.0);
}

TEST_CASE("regularization adds one pseudo-observation at the accuracy") {
  EventSeries series;
  series.uncertainties = {1, 2, 3, 4, 5};
  series.outcomes = {1, 1, 1, 1, 0};  // accuracy 0.8
  const auto model = fit_bin_model(series, 5, true);
  REQUIRE(model.bin_count() == 5);
  // Singleton bin with outcome 1: (1*1 + 0.8) / 2 = 0.9
  CHECK(model.probs[0] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(model.raw_probs[0] == 1.0);
  // Singleton bin with outcome 0: (0 + 0.8) / 2 = 0.4
  CHECK(model.probs[4] == doctest::Approx(0.4).epsilon(1e-15));
  for (double p : model.probs) {
    CHECK(p > 0.0);
    CHECK(p < 1.0);
  }
}

TEST_CASE("an all-ones bin regularizes to (|B| + p_bar) / (|B| + 1)") {
  EventSeries series;
  // Bin 1 (u <= 3) all correct, bin 2 mixed, so the accuracy is interior.
  series.uncertainties = {1, 2, 3, 4, 5, 6};
  series.outcomes = {1, 1, 1, 1, 0, 0};
  const auto model = fit_bin_model(series, 2, true);
  const double p_bar = 4.0 / 6.0;
  CHECK(model.accuracy == doctest::Approx(p_bar).epsilon(1e-15));
  CHECK(model.probs[0] == doctest::Approx((3.0 + p_bar) / 4.0).epsilon(1e-15));
  CHECK(model.probs[0] < 1.0);
}

TEST_CASE("degenerate series cannot be regularized off the boundary") {
  EventSeries series;
  series.uncertainties = {1, 2, 3, 4};
  series.outcomes = {1, 1, 1, 1};
  CHECK_THROWS_AS(fit_bin_model(series, 2, true), Error);
  // Unregularized fit is fine and saturates at 1.
  const auto model = fit_bin_model(series, 2, false);
  CHECK(model.probs[0] == 1.0);
}

TEST_CASE("evaluating the training series reproduces the fit") {
  const auto synth = testsupport::make_linear_synth(500, 43, 0.3, 0.9);
  const auto model = fit_bin_model(synth.series, 10, false);
  const auto again = evaluate_bin_model(model, synth.series);
  CHECK(again.probs == model.probs);
  CHECK(again.weights == model.weights);
  CHECK(again.counts == model.counts);
  CHECK(ece(again, model) == 0.0);
}

TEST_CASE("bins the test split never reaches keep the training value") {
  EventSeries train;
  train.uncertainties = {1, 2, 3, 4, 5, 6};
  train.outcomes = {0, 1, 0, 1, 0, 1};
  const auto model = fit_bin_model(train, 3, false);

  EventSeries test;
  test.uncertainties = {1.5, 1.7};  // only the first bin
  test.outcomes = {1, 0};
  const auto evaluated = evaluate_bin_model(model, test);
  CHECK(evaluated.zero_count_bins() == std::vector<std::size_t>{1, 2});
  CHECK(evaluated.weights[1] == 0.0);
  CHECK(evaluated.weights[2] == 0.0);
  CHECK(evaluated.probs[1] == model.probs[1]);
  CHECK(evaluated.probs[2] == model.probs[2]);
  CHECK(evaluated.probs[0] == 0.5);
  CHECK(evaluated.counts[0] == 2);
}

TEST_CASE("test bins stay within summed Hoeffding half-widths of train") {
  std::size_t events = 0;
  std::size_t contained = 0;
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    const auto synth =
        testsupport::make_linear_synth(2000, 1000 + trial, 0.35, 0.95);
    const auto [calibration, evaluation] = split_half(synth.series, trial);
    const auto model = fit_bin_model(calibration, 8, false);
    const auto evaluated = evaluate_bin_model(model, evaluation);
    for (std::size_t i = 0; i < model.bin_count(); ++i) {
      if (evaluated.counts[i] == 0) continue;
      ++events;
      const double bound = hoeffding_half_width(model.counts[i], 0.01) +
                           hoeffding_half_width(evaluated.counts[i], 0.01);
      if (std::abs(evaluated.probs[i] - model.probs[i]) <= bound) ++contained;
    }
  }
  CHECK(static_cast<double>(contained) >=
        0.99 * static_cast<double>(events));
}

TEST_CASE("hoeffding half-width formula") {
  CHECK(hoeffding_half_width(100, 2.0) == 0.0);
  CHECK(hoeffding_half_width(2500, 0.005) ==
        doctest::Approx(std::sqrt(std::log(400.0) / 5000.0)).epsilon(1e-15));
  const double base = hoeffding_half_width(500, 0.05);
  CHECK(hoeffding_half_width(2000, 0.05) ==
        doctest::Approx(base / 2.0).epsilon(1e-14));
  CHECK_THROWS_AS(hoeffding_half_width(0, 0.05), Error);
  CHECK_THROWS_AS(hoeffding_half_width(10, 0.0), Error);
}

TEST_CASE("predict returns the bin probability with its interval") {
  // One bin holding 2000 samples, 1990 of them correct.
  EventSeries series;
  for (int i = 0; i < 2000; ++i) {
    series.uncertainties.push_back(static_cast<double>(i % 17));
    series.outcomes.push_back(i < 1990 ? 1 : 0);
  }
  const auto model = fit_bin_model(series, 1, false);
  const auto [p, interval] = predict(model, 3.0, 0.05);
  CHECK(p == doctest::Approx(0.995).epsilon(1e-12));
  CHECK(interval.half_width ==
        doctest::Approx(0.030368073095415258).epsilon(1e-12));
  CHECK(interval.upper() == 1.0);

  // Single-bin model answers the accuracy everywhere.
  const auto [p_low, i_low] = predict(model, -1e300, 0.05);
  const auto [p_high, i_high] = predict(model, 1e300, 0.05);
  CHECK(p_low == p_high);
  CHECK(p_low == model.accuracy);
}

TEST_CASE("distinct values give equal-mass bins (counts differ by <= 1)") {
  SplitMix64 rng(47);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 20 + rng.next_below(400);
    const std::size_t m_bins = 1 + rng.next_below(15);
    if (n < m_bins) continue;
    EventSeries series;
    for (std::size_t i = 0; i < n; ++i) {
      series.uncertainties.push_back(rng.next_double());
      series.outcomes.push_back(static_cast<std::uint8_t>(rng.next() & 1));
    }
    series.outcomes[0] = 1;
    const auto model = fit_bin_model(series, m_bins, false);
    std::size_t lo = n;
    std::size_t hi = 0;
    for (auto c : model.counts) {
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
    CHECK(hi - lo <= 1);
  }
}

TEST_CASE("strictly increasing transforms leave the fit bit-identical") {
  SplitMix64 rng(53);
  for (int trial = 0; trial < 50; ++trial) {
    const auto synth =
        testsupport::make_linear_synth(400, 600 + trial, 0.2, 0.9);
    EventSeries transformed = synth.series;
    for (double& u : transformed.uncertainties) u = std::exp(u);
    const auto a = fit_bin_model(synth.series, 7, false);
    const auto b = fit_bin_model(transformed, 7, false);
    CHECK(a.probs == b.probs);
    CHECK(a.weights == b.weights);
    CHECK(a.counts == b.counts);
  }
}

TEST_CASE("bin estimates converge at the Hoeffding rate") {
  double previous_gap = 1.0;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    const auto synth = testsupport::make_linear_synth(n, 59, 0.25, 0.95);
    const auto model = fit_bin_model(synth.series, 10, false);
    // True conditional mean per bin, from the generator.
    std::vector<double> totals(model.bin_count(), 0.0);
    std::vector<std::size_t> counts(model.bin_count(), 0);
    for (std::size_t j = 0; j < synth.series.size(); ++j) {
      const std::size_t b =
          assign_bin(synth.series.uncertainties[j], model.edges);
      totals[b] += synth.true_p[j];
      ++counts[b];
    }
    double max_gap = 0.0;
    double max_bound = 0.0;
    for (std::size_t i = 0; i < model.bin_count(); ++i) {
      const double truth = totals[i] / static_cast<double>(counts[i]);
      max_gap = std::max(max_gap, std::abs(model.probs[i] - truth));
      max_bound = std::max(max_bound, hoeffding_half_width(counts[i], 0.001));
    }
    CHECK(max_gap <= max_bound);
    CHECK(max_gap <= previous_gap);
    previous_gap = max_gap;
  }
}

TEST_CASE("more bins approximate the conditional probability better") {
  const auto synth = testsupport::make_linear_synth(40000, 61, 0.72, 0.999);
  const auto fresh = testsupport::make_linear_synth(20000, 62, 0.72, 0.999);
  double previous = 1.0;
  std::size_t inversions = 0;
  for (std::size_t m_bins : {2u, 5u, 10u, 20u}) {
    const auto model = fit_bin_model(synth.series, m_bins, false);
    double mse = 0.0;
    for (std::size_t j = 0; j < fresh.series.size(); ++j) {
      const auto [p, interval] =
          predict(model, fresh.series.uncertainties[j], 0.05);
      const double gap = p - fresh.true_p[j];
      mse += gap * gap;
    }
    mse /= static_cast<double>(fresh.series.size());
    if (mse > previous) ++inversions;
    previous = mse;
  }
  CHECK(inversions <= 1);
}

}  // TEST_SUITE
