#include "fedshot/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fedshot/parallel.hpp"

namespace fedshot {

namespace {

void check_scores(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("auc: scores/labels length mismatch");
  }
  for (double s : scores) {
    if (std::isnan(s)) throw std::invalid_argument("auc: NaN score");
  }
}

}  // namespace

std::optional<double> auc(std::span<const double> scores,
                          std::span<const double> labels) {
  check_scores(scores, labels);
  const std::size_t n = scores.size();

  std::size_t positives = 0;
  for (double label : labels) {
    if (label > 0) ++positives;
  }
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of positive ranks with average ranks over tie groups. Ranks are
  // multiples of 1/2, so the arithmetic below stays exact for modest n.
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>((i + 1) + (j + 1));
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] > 0) positive_rank_sum += avg_rank;
    }
    i = j + 1;
  }

  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

std::optional<double> auc_bruteforce(std::span<const double> scores,
                                     std::span<const double> labels) {
  check_scores(scores, labels);
  const std::size_t n = scores.size();

  double wins = 0.0;
  std::size_t positives = 0, negatives = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] <= 0) continue;
    ++positives;
    for (std::size_t j = 0; j < n; ++j) {
      if (labels[j] > 0) continue;
      if (scores[i] > scores[j]) wins += 1.0;
      else if (scores[i] == scores[j]) wins += 0.5;
    }
  }
  negatives = n - positives;
  if (positives == 0 || negatives == 0) return std::nullopt;
  return wins / (static_cast<double>(positives) * static_cast<double>(negatives));
}

std::vector<DeviceScorecard> evaluate_per_device(
    const std::function<double(std::span<const double>)>& decision,
    const FederatedDataset& dataset, unsigned threads) {
  std::vector<DeviceScorecard> cards(dataset.devices.size());
  parallel_for(
      dataset.devices.size(),
      [&](std::size_t t) {
        const auto& dev = dataset.devices[t];
        auto& card = cards[t];
        card.device_id = dev.device_id;
        card.n_test = dev.test.size();
        std::vector<double> scores(dev.test.size());
        for (std::size_t i = 0; i < scores.size(); ++i) {
          scores[i] = decision(dev.test.X.row(i));
        }
        card.auc = auc(scores, dev.test.y);
      },
      threads);
  return cards;
}

std::vector<DeviceScorecard> evaluate_local_baseline(
    std::span<const LocalModel> models, const FederatedDataset& dataset,
    unsigned threads) {
  if (models.size() != dataset.devices.size()) {
    throw std::invalid_argument("evaluate_local_baseline: model/device count mismatch");
  }
  std::vector<DeviceScorecard> cards(dataset.devices.size());
  parallel_for(
      dataset.devices.size(),
      [&](std::size_t t) {
        const auto& dev = dataset.devices[t];
        std::vector<double> scores(dev.test.size());
        for (std::size_t i = 0; i < scores.size(); ++i) {
          scores[i] = models[t].decision(dev.test.X.row(i));
        }
        cards[t] = DeviceScorecard{dev.device_id, auc(scores, dev.test.y),
                                   dev.test.size()};
      },
      threads);
  return cards;
}

SummaryMetrics summarize(const std::vector<DeviceScorecard>& cards) {
  std::vector<double> defined;
  defined.reserve(cards.size());
  for (const auto& card : cards) {
    if (card.auc) defined.push_back(*card.auc);
  }
  if (defined.empty()) throw std::runtime_error("summarize: no defined device AUCs");

  SummaryMetrics out;
  out.evaluated_devices = defined.size();
  out.skipped_devices = cards.size() - defined.size();
  out.mean_auc = std::accumulate(defined.begin(), defined.end(), 0.0) /
                 static_cast<double>(defined.size());

  std::sort(defined.begin(), defined.end());
  const auto interp = [&](int pct) {
    const double h = (static_cast<double>(defined.size()) - 1.0) * pct / 100.0;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, defined.size() - 1);
    return defined[lo] + (h - static_cast<double>(lo)) * (defined[hi] - defined[lo]);
  };
  for (int pct : {5, 25, 50, 75, 95}) out.percentiles[pct] = interp(pct);
  return out;
}

double relative_gain(const SummaryMetrics& method, const SummaryMetrics& local) {
  if (local.mean_auc == 0.0) throw std::runtime_error("relative_gain: local mean AUC is zero");
  return (method.mean_auc - local.mean_auc) / local.mean_auc;
}

double fraction_of_ideal(const SummaryMetrics& method, const SummaryMetrics& ideal) {
  if (ideal.mean_auc == 0.0) throw std::runtime_error("fraction_of_ideal: ideal mean AUC is zero");
  return method.mean_auc / ideal.mean_auc;
}

}  // namespace fedshot
