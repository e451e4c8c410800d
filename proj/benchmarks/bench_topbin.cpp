#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "topbin/binning.hpp"
#include "topbin/evaluation.hpp"
#include "topbin/measures.hpp"
#include "topbin/rng.hpp"
#include "topbin/scoring.hpp"

namespace {

topbin::EventSeries synthetic_series(std::size_t n, std::uint64_t seed) {
  topbin::SplitMix64 rng(seed);
  topbin::EventSeries series;
  series.uncertainties.reserve(n);
  series.outcomes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.next_double();
    const double p = 0.999 - 0.35 * u;
    series.uncertainties.push_back(u);
    series.outcomes.push_back(
        static_cast<std::uint8_t>(rng.next_double() < p));
  }
  return series;
}

void BM_FitBinModel(benchmark::State& state) {
  const auto series =
      synthetic_series(static_cast<std::size_t>(state.range(0)), 1);
  const auto m_bins = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(topbin::fit_bin_model(series, m_bins, true));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FitBinModel)
    ->Args({10000, 10})
    ->Args({100000, 10})
    ->Args({100000, 100})
    ->Args({1000000, 100});

void BM_Predict(benchmark::State& state) {
  const auto series = synthetic_series(100000, 2);
  const auto model = topbin::fit_bin_model(series, 100, true);
  topbin::SplitMix64 rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(topbin::predict(model, rng.next_double(), 0.05));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Predict);

void BM_ScorePair(benchmark::State& state) {
  const auto train = synthetic_series(100000, 4);
  const auto test = synthetic_series(100000, 5);
  const auto model = topbin::fit_bin_model(train, 100, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        topbin::score_pair(model, test, train.direction));
  }
  state.SetItemsProcessed(state.iterations() * 100000);
}
BENCHMARK(BM_ScorePair);

void BM_KFoldReport(benchmark::State& state) {
  const auto series = synthetic_series(50000, 6);
  for (auto _ : state) {
    benchmark::DoNotOptimize(topbin::kfold_report(series, 10, 20, 7));
  }
}
BENCHMARK(BM_KFoldReport)->Unit(benchmark::kMillisecond);

void BM_Softmax(benchmark::State& state) {
  topbin::SplitMix64 rng(8);
  std::vector<double> scores(static_cast<std::size_t>(state.range(0)));
  for (double& s : scores) s = rng.next_double() * 12.0 - 6.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(topbin::softmax(scores));
  }
}
BENCHMARK(BM_Softmax)->Arg(10)->Arg(1000);

void BM_EnsembleSpectralNorm(benchmark::State& state) {
  topbin::SplitMix64 rng(9);
  topbin::PredictionRecord record;
  const std::size_t classes = static_cast<std::size_t>(state.range(0));
  record.scores.assign(classes, 0.0);
  std::vector<std::vector<double>> members(10,
                                           std::vector<double>(classes));
  for (auto& member : members) {
    for (double& v : member) v = rng.next_double();
  }
  record.ensemble_scores = members;
  for (auto _ : state) {
    benchmark::DoNotOptimize(topbin::ensemble_cov_spectral_norm(record));
  }
}
BENCHMARK(BM_EnsembleSpectralNorm)->Arg(10)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
