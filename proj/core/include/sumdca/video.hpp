#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sumdca/matrix.hpp"

namespace sumdca {

/// Ordered shots tiling [0, T): shot i covers [starts[i], starts[i] + lengths[i]).
struct ShotPartition {
  std::vector<std::size_t> starts;
  std::vector<std::size_t> lengths;

  /// Builds from strictly increasing start frames beginning at 0.
  static ShotPartition from_starts(std::vector<std::size_t> starts, std::size_t frame_count);
  static ShotPartition single(std::size_t frame_count);

  std::size_t shot_count() const noexcept { return starts.size(); }
  std::size_t frame_count() const noexcept;
  /// Throws ContractError unless the shots tile [0, frame_count) with l_i >= 1.
  void validate(std::size_t frame_count) const;

  friend bool operator==(const ShotPartition&, const ShotPartition&) = default;
};

/// One video: per-frame features plus whatever annotations it carries.
struct VideoRecord {
  std::string id;
  std::string corpus;
  Matrix features;                                  // T x d
  std::optional<std::vector<std::uint8_t>> gt_binary;
  std::optional<std::vector<double>> gt_scores;
  std::vector<std::vector<std::uint8_t>> user_summaries;
  std::optional<ShotPartition> change_points;
  std::optional<std::vector<std::uint64_t>> picks;   // original frame index per sampled frame

  std::size_t frame_count() const noexcept { return features.rows(); }
  std::size_t feature_dim() const noexcept { return features.cols(); }

  /// Throws DataError on length mismatches, non-binary labels or NaN/Inf features.
  void validate() const;

  friend bool operator==(const VideoRecord&, const VideoRecord&) = default;
};

}  // namespace sumdca
