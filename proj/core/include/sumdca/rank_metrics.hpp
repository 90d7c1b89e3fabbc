#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace sumdca {

enum class UserAggregation { kMax, kMean };
std::string_view to_string(UserAggregation agg);
UserAggregation parse_aggregation(std::string_view text);

/// Frame-overlap F-score in percent. 0 when either mask is empty.
/// Throws ContractError on a length mismatch.
double fscore(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> user);

/// F-score against several user summaries, combined by `agg`.
double fscore_users(std::span<const std::uint8_t> pred, const std::vector<std::vector<std::uint8_t>>& users,
                    UserAggregation agg);

/// A correlation; `defined` is false (and value 0) when either input is constant.
struct RankCorrelation {
  double value = 0.0;
  bool defined = false;
};

/// Kendall tau-b with tie correction on both sides.
RankCorrelation kendall_tau(std::span<const double> pred, std::span<const double> truth);

/// Spearman rho: Pearson correlation of mean (tie-averaged) ranks.
RankCorrelation spearman_rho(std::span<const double> pred, std::span<const double> truth);

/// 1-based ranks, ties receive the mean of the positions they span.
std::vector<double> average_ranks(std::span<const double> values);

}  // namespace sumdca
