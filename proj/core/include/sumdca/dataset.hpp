#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sumdca/rank_metrics.hpp"
#include "sumdca/video.hpp"

namespace sumdca {

inline constexpr std::uint32_t kDatasetFormatVersion = 1;
inline constexpr std::uint32_t kVideoFormatVersion = 1;

/// A collection of videos sharing one feature dimension.
///
/// On disk: `manifest.json` holding
///   {"format_version": 1, "name": ..., "feature_dim": d, "aggregation": "max"|"mean",
///    "videos": [{"id": ..., "corpus": ..., "file": "videos/0000.sdv"}, ...]}
/// and one binary file per video (see write_video).
struct Dataset {
  std::string name = "dataset";
  std::size_t feature_dim = 0;
  UserAggregation aggregation = UserAggregation::kMax;
  std::vector<VideoRecord> videos;

  /// Validates every record and the shared feature dimension.
  void validate() const;
};

/// Per-video binary layout, little-endian:
///   "SDCAVID1"  u32 version  u32 flags  u64 T  u64 d  string id  string corpus
///   f64[T*d] features (row-major)
///   sections, each: 4-byte tag, u64 payload bytes, payload
///     GTBN  u8[T]                 binary labels           (flag bit 0)
///     GTSC  f64[T]                importance scores       (flag bit 1)
///     USER  u32 n, u8[n*T]        user summaries          (flag bit 2)
///     CHPT  u64 S, u64[S]         shot start frames       (flag bit 3)
///     PICK  u64[T]                original frame indices  (flag bit 4)
///   "END!"
/// Strings are a u32 byte count followed by the bytes.
void write_video(std::ostream& out, const VideoRecord& video);
VideoRecord read_video(std::istream& in, const std::string& source);

void save_video(const std::filesystem::path& path, const VideoRecord& video);
VideoRecord load_video(const std::filesystem::path& path);

/// Writes `dir/manifest.json` and `dir/videos/NNNN.sdv`.
void save_dataset(const std::filesystem::path& dir, const Dataset& dataset);

/// Accepts a manifest path or a directory containing manifest.json.
Dataset load_dataset(const std::filesystem::path& path);

/// Relative paths that do not exist are retried under $SUMDCA_DATA_DIR.
std::filesystem::path resolve_data_path(const std::filesystem::path& path);

}  // namespace sumdca
