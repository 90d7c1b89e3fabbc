#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "sumdca/matrix.hpp"
#include "sumdca/video.hpp"

namespace sumdca {

struct KtsOptions {
  /// Multiplies the estimated per-frame noise energy to give the penalty weight.
  double penalty_scale = 8.0;
};

/// Kernel temporal segmentation with the linear kernel. For each segment count
/// m <= max_shots the within-segment scatter J(m) is minimized by dynamic
/// programming; the returned m minimizes J(m) + g * m * (log(T / m) + 1), where
/// g = penalty_scale * (half the median squared step between consecutive
/// frames), floored at 1e-3 * J(1) / T. max_shots > T yields T single-frame shots.
ShotPartition kts_segment(const Matrix& features, std::size_t max_shots, const KtsOptions& options = {});

/// Minimal within-segment scatter for every segment count 1..max_shots
/// (index m - 1), together with the optimal partition for each count.
struct KtsTable {
  std::vector<double> scatter;
  std::vector<ShotPartition> partitions;
};
KtsTable kts_table(const Matrix& features, std::size_t max_shots);

/// Per-shot mean of frame scores.
std::vector<double> shot_scores(std::span<const double> frame_scores, const ShotPartition& part);

/// Default segment cap used when the caller does not provide one.
std::size_t default_max_shots(std::size_t frame_count);

}  // namespace sumdca
