#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sumdca/rank_metrics.hpp"
#include "sumdca/summary.hpp"
#include "sumdca/training.hpp"
#include "sumdca/video.hpp"

namespace sumdca {

/// Which corpora form the training set of each fold.
///   canonical: the other folds of the target corpus
///   augmented: the other folds of the target corpus plus every other corpus
///   transfer:  every other corpus only
/// Test videos are always one fold of the target corpus.
enum class ProtocolMode { kCanonical, kAugmented, kTransfer };
std::string_view to_string(ProtocolMode mode);
ProtocolMode parse_protocol_mode(std::string_view text);

struct EvalProtocol {
  ProtocolMode mode = ProtocolMode::kCanonical;
  /// 1 means train and test on the same videos.
  std::size_t folds = 5;
  UserAggregation agg = UserAggregation::kMax;
  std::uint64_t seed = 0;
  /// Empty selects the corpus of the first video.
  std::string target_corpus;
  /// Folds trained concurrently; results are joined by fold index.
  std::size_t threads = 1;
  void validate() const;
};

/// Test video ids per fold.
struct FoldSplits {
  std::uint64_t seed = 0;
  std::vector<std::vector<std::string>> folds;
  friend bool operator==(const FoldSplits&, const FoldSplits&) = default;
};

/// Seeded shuffle of `ids`, dealt round-robin into `folds` groups.
FoldSplits make_splits(std::span<const std::string> ids, std::size_t folds, std::uint64_t seed);
/// JSON text: {"seed": s, "folds": [["id", ...], ...]}.
void save_splits(const std::filesystem::path& path, const FoldSplits& splits);
FoldSplits load_splits(const std::filesystem::path& path);

struct VideoMetrics {
  std::string id;
  std::size_t fold = 0;
  double fscore = 0.0;  // percent
  bool has_importance = false;
  RankCorrelation tau;
  RankCorrelation rho;
};

struct EvalReport {
  std::string method;
  EvalProtocol protocol;
  double budget_ratio = kDefaultBudgetRatio;
  std::vector<VideoMetrics> videos;
  /// Mean over folds of the per-fold video means.
  double mean_fscore = 0.0;
  /// Means over videos with importance scores; undefined correlations count as 0.
  double mean_tau = 0.0;
  double mean_rho = 0.0;
  std::size_t rank_videos = 0;
  std::size_t undefined_rank = 0;
};

/// User summaries of a video, falling back to its binary labels.
std::vector<std::vector<std::uint8_t>> reference_summaries(const VideoRecord& video);

/// Metrics of one scored video.
VideoMetrics score_video(const VideoRecord& video, const SummaryMask& summary, UserAggregation agg);

/// Evaluates fixed parameters; never modifies them.
std::vector<VideoMetrics> evaluate_params(std::span<const VideoRecord> videos, const ModelParams& params,
                                          UserAggregation agg, const SummaryOptions& options);

/// Full protocol: split, train per fold, evaluate the held-out fold.
/// `splits`, when given, replaces the seeded split of the target corpus.
/// Throws ContractError for a transfer run without other corpora.
EvalReport evaluate(std::span<const VideoRecord> videos, const TrainConfig& config, const EvalProtocol& protocol,
                    const SummaryOptions& options, const FoldSplits* splits = nullptr);

/// Uniform random frame scores through the same selection path.
EvalReport random_baseline(std::span<const VideoRecord> videos, const EvalProtocol& protocol,
                           const SummaryOptions& options);

/// Each user summary scored against the remaining users (leave-one-out).
/// Rank correlations are not applicable and stay undefined.
EvalReport human_baseline(std::span<const VideoRecord> videos, const EvalProtocol& protocol);

/// Fills the means from `videos`.
void finalize_report(EvalReport& report);

void write_report_text(std::ostream& out, const EvalReport& report);
/// Columns: method,video,fold,fscore,tau,tau_defined,rho,rho_defined
void write_report_csv(std::ostream& out, const EvalReport& report, bool header = true);

/// Videos belonging to the target corpus of `protocol`.
std::string target_corpus(std::span<const VideoRecord> videos, const EvalProtocol& protocol);

}  // namespace sumdca
