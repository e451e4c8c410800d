// Test-only oracles and data generators. Everything here stays independent
// of the library code paths it checks: the eigensolver is a Jacobi sweep
// (the library uses power iteration), bin lookup is a linear scan (the
// library binary-searches), score sums are per-bin closed forms (the
// library sums per sample).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "topbin/rng.hpp"
#include "topbin/types.hpp"

namespace testsupport {

// Largest |eigenvalue| of a dense symmetric matrix via cyclic Jacobi
// rotations.
inline double jacobi_max_abs_eigenvalue(std::vector<double> a,
                                        std::size_t n) {
  auto at = [&](std::size_t r, std::size_t c) -> double& {
    return a[r * n + c];
  };
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = r + 1; c < n; ++c) off += at(r, c) * at(r, c);
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(at(p, q)) < 1e-300) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p);
          const double akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k);
          const double aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) best = std::max(best, std::abs(at(i, i)));
  return best;
}

inline std::size_t linear_scan_bin(double u, const std::vector<double>& edges) {
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (u > edges[i] && u <= edges[i + 1]) return i;
  }
  return edges.size() - 2;
}

// True label in the k best scores, by exhaustive sort (score desc, index asc).
inline int brute_force_topk(const std::vector<double>& scores, int label,
                            int k) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  for (int r = 0; r < k; ++r) {
    if (order[static_cast<std::size_t>(r)] ==
        static_cast<std::size_t>(label)) {
      return 1;
    }
  }
  return 0;
}

inline std::vector<double> softmax_long_double(
    const std::vector<double>& scores) {
  long double peak = scores[0];
  for (double s : scores) peak = std::max<long double>(peak, s);
  std::vector<long double> e(scores.size());
  long double total = 0.0L;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    e[i] = std::exp(static_cast<long double>(scores[i]) - peak);
    total += e[i];
  }
  std::vector<double> out(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = static_cast<double>(e[i] / total);
  }
  return out;
}

// Synthetic series with a known conditional probability. U ~ Uniform(0,1),
// p(u) linear between p_at_0 and p_at_1, outcome ~ Bernoulli(p(u)).
struct Synth {
  topbin::EventSeries series;
  std::vector<double> true_p;
  double p_at_0 = 0.0;
  double p_at_1 = 0.0;

  double conditional(double u) const {
    return p_at_0 + (p_at_1 - p_at_0) * u;
  }
};

inline Synth make_linear_synth(std::size_t n, std::uint64_t seed,
                               double p_at_0, double p_at_1) {
  Synth synth;
  synth.p_at_0 = p_at_0;
  synth.p_at_1 = p_at_1;
  synth.series.event_kind = topbin::EventKind{1};
  synth.series.direction = topbin::Direction::HigherMoreConfident;
  topbin::SplitMix64 rng(seed);
  synth.series.uncertainties.reserve(n);
  synth.series.outcomes.reserve(n);
  synth.true_p.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.next_double();
    const double p = p_at_0 + (p_at_1 - p_at_0) * u;
    synth.series.uncertainties.push_back(u);
    synth.series.outcomes.push_back(
        static_cast<std::uint8_t>(rng.next_double() < p ? 1 : 0));
    synth.true_p.push_back(p);
  }
  return synth;
}

// Random series with mixed outcomes (both classes present).
inline topbin::EventSeries make_random_series(std::size_t n,
                                              std::uint64_t seed) {
  topbin::SplitMix64 rng(seed);
  topbin::EventSeries series;
  series.event_kind = topbin::EventKind{1};
  for (std::size_t i = 0; i < n; ++i) {
    series.uncertainties.push_back(rng.next_double() * 10.0 - 5.0);
    series.outcomes.push_back(static_cast<std::uint8_t>(rng.next() & 1));
  }
  // Force both outcome classes so regularization stays interior.
  series.outcomes[0] = 0;
  series.outcomes[n - 1] = 1;
  return series;
}

// The four-coin experiment encoded exactly: 1600 tosses per coin with
// dyadic head counts, so fitted probabilities are exact doubles.
inline topbin::EventSeries make_coin_series() {
  topbin::EventSeries series;
  series.event_kind = topbin::EventKind{1};
  const std::size_t per_coin = 1600;
  const std::size_t heads[4] = {800, 800, 1500, 100};
  for (std::size_t coin = 0; coin < 4; ++coin) {
    for (std::size_t j = 0; j < per_coin; ++j) {
      series.uncertainties.push_back(static_cast<double>(coin + 1));
      series.outcomes.push_back(static_cast<std::uint8_t>(j < heads[coin]));
    }
  }
  return series;
}

// Mislabel corpus: K-class records whose softmax confidence c is explicit;
// a slice of the most confident samples gets deliberately wrong labels.
struct PlantedCorpus {
  std::vector<topbin::PredictionRecord> records;
  std::vector<std::string> planted_ids;
};

inline PlantedCorpus make_planted_corpus(std::size_t n, double flip_fraction,
                                         std::uint64_t seed) {
  const int classes = 10;
  topbin::SplitMix64 rng(seed);
  PlantedCorpus corpus;
  const auto flips = static_cast<std::size_t>(
      static_cast<double>(n) * flip_fraction);
  for (std::size_t i = 0; i < n; ++i) {
    // Confidence levels concentrate near 1 like a trained model's Pmax.
    const bool plant = i < flips;
    const double c = plant ? 0.985 + 0.014 * rng.next_double()
                           : 0.55 + 0.449 * rng.next_double();
    const int best = static_cast<int>(rng.next_below(classes));
    topbin::PredictionRecord record;
    char id[16];
    std::snprintf(id, sizeof(id), "s%06zu", i);
    record.sample_id = id;
    record.scores.assign(classes, std::log((1.0 - c) / (classes - 1)));
    record.scores[static_cast<std::size_t>(best)] = std::log(c);
    if (plant) {
      // Label error: the annotation disagrees with an (almost surely
      // correct) very confident prediction.
      record.true_label = (best + 1 + static_cast<int>(rng.next_below(
                                          classes - 1))) % classes;
      corpus.planted_ids.push_back(record.sample_id);
    } else {
      // Otherwise the model is right with probability c.
      const bool correct = rng.next_double() < c;
      record.true_label =
          correct ? best
                  : (best + 1 + static_cast<int>(rng.next_below(classes - 1))) %
                        classes;
    }
    corpus.records.push_back(std::move(record));
  }
  return corpus;
}

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    path_ = std::filesystem::temp_directory_path() /
            ("topbin_test_" + tag + "_" + std::to_string(counter()++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  static std::size_t& counter() {
    static std::size_t value = 0;
    return value;
  }
  std::filesystem::path path_;
};

}  // namespace testsupport
