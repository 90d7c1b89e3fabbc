#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sumdca/model.hpp"
#include "sumdca/segmentation.hpp"
#include "sumdca/video.hpp"

namespace sumdca {

inline constexpr double kDefaultBudgetRatio = 0.15;

struct SummaryOptions {
  double budget_ratio = kDefaultBudgetRatio;
  /// 0 selects default_max_shots(T). Ignored when the video carries change points.
  std::size_t max_shots = 0;
  KtsOptions kts;
};

struct SummaryMask {
  std::vector<double> frame_scores;
  ShotPartition partition;
  std::vector<double> shot_scores;
  std::vector<std::uint8_t> selected_shots;  // one flag per shot
  std::vector<std::uint8_t> mask;            // one flag per frame
  std::size_t budget = 0;
};

/// floor(ratio * T); throws ContractError unless 0 < ratio <= 1.
std::size_t summary_budget(double budget_ratio, std::size_t frame_count);

/// Shot partition of a video: stored change points or KTS on its features.
ShotPartition video_partition(const VideoRecord& video, const SummaryOptions& options);

/// Shot means of `frame_scores`, knapsack under the budget, expanded to frames.
SummaryMask summarize_scores(std::span<const double> frame_scores, const ShotPartition& part,
                             double budget_ratio);

/// Full pipeline: model scores, partition, selection.
SummaryMask generate_summary(const VideoRecord& video, const ModelParams& params,
                             const SummaryOptions& options = {});

/// Per-frame 0/1 labels from annotated importance scores via the same path.
std::vector<std::uint8_t> binarize_ground_truth(std::span<const double> frame_scores,
                                                const ShotPartition& part, double budget_ratio);

/// Comment lines with the video id, change points, shot scores and selected
/// shots, then `frame,score,selected` rows.
void write_summary_csv(std::ostream& out, const std::string& video_id, const SummaryMask& summary);

}  // namespace sumdca
