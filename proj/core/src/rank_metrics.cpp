#include "sumdca/rank_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sumdca/errors.hpp"

namespace sumdca {

std::string_view to_string(UserAggregation agg) { return agg == UserAggregation::kMax ? "max" : "mean"; }

UserAggregation parse_aggregation(std::string_view text) {
  if (text == "max") return UserAggregation::kMax;
  if (text == "mean") return UserAggregation::kMean;
  throw ContractError("unknown user aggregation '" + std::string(text) + "' (expected max or mean)");
}

double fscore(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> user) {
  if (pred.size() != user.size())
    throw ContractError("fscore: prediction has " + std::to_string(pred.size()) + " frames, user summary " +
                        std::to_string(user.size()));
  std::size_t overlap = 0, np = 0, nu = 0;
  for (std::size_t t = 0; t < pred.size(); ++t) {
    np += pred[t] != 0;
    nu += user[t] != 0;
    overlap += pred[t] != 0 && user[t] != 0;
  }
  if (np == 0 || nu == 0 || overlap == 0) return 0.0;
  const double p = static_cast<double>(overlap) / static_cast<double>(np);
  const double r = static_cast<double>(overlap) / static_cast<double>(nu);
  return 2.0 * p * r / (p + r) * 100.0;
}

double fscore_users(std::span<const std::uint8_t> pred, const std::vector<std::vector<std::uint8_t>>& users,
                    UserAggregation agg) {
  if (users.empty()) throw ContractError("fscore_users: no user summaries");
  double best = 0.0, sum = 0.0;
  for (const auto& u : users) {
    const double f = fscore(pred, u);
    best = std::max(best, f);
    sum += f;
  }
  return agg == UserAggregation::kMax ? best : sum / static_cast<double>(users.size());
}

namespace {

void check_pair(std::span<const double> a, std::span<const double> b, std::string_view what) {
  if (a.size() != b.size())
    throw ContractError(std::string(what) + ": inputs have " + std::to_string(a.size()) + " and " +
                        std::to_string(b.size()) + " entries");
  if (a.size() < 2) throw ContractError(std::string(what) + ": needs at least 2 entries");
}

bool is_constant(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

int sign(double x) { return (x > 0) - (x < 0); }

}  // namespace

RankCorrelation kendall_tau(std::span<const double> pred, std::span<const double> truth) {
  check_pair(pred, truth, "kendall_tau");
  if (is_constant(pred) || is_constant(truth)) return {};
  const std::size_t n = pred.size();
  long long concordant_minus_discordant = 0;
  long long untied_pred = 0, untied_truth = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const int a = sign(pred[i] - pred[j]);
      const int b = sign(truth[i] - truth[j]);
      concordant_minus_discordant += a * b;
      untied_pred += a != 0;
      untied_truth += b != 0;
    }
  const double denom = std::sqrt(static_cast<double>(untied_pred) * static_cast<double>(untied_truth));
  return {std::clamp(static_cast<double>(concordant_minus_discordant) / denom, -1.0, 1.0), true};
}

std::vector<double> average_ranks(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

RankCorrelation spearman_rho(std::span<const double> pred, std::span<const double> truth) {
  check_pair(pred, truth, "spearman_rho");
  if (is_constant(pred) || is_constant(truth)) return {};
  const std::vector<double> a = average_ranks(pred);
  const std::vector<double> b = average_ranks(truth);
  const double n = static_cast<double>(a.size());
  const double mean = (n + 1.0) / 2.0;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i] - mean;
    const double y = b[i] - mean;
    sab += x * y;
    saa += x * x;
    sbb += y * y;
  }
  return {std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0), true};
}

}  // namespace sumdca
