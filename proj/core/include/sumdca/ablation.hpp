#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sumdca/evaluation.hpp"

namespace sumdca {

enum class AblationAxis { kSimilarity, kRadius, kLosses, kModules };
std::string_view to_string(AblationAxis axis);
AblationAxis parse_ablation_axis(std::string_view text);

struct AblationSetting {
  std::string label;
  TrainConfig config;
};

/// Variants of `base` along one axis:
///   similarity: dot, cosine, l2
///   radius:     each entry of `radii`
///   losses:     classification alone, +repelling, +reconstruction, all three
///               (unsupervised bases drop the classification-only row)
///   modules:    none, gda, lca, gda+lca
std::vector<AblationSetting> ablation_settings(AblationAxis axis, const TrainConfig& base,
                                               std::span<const std::size_t> radii = {});

struct AblationRow {
  std::string axis;
  std::string setting;
  EvalReport report;
};

/// Runs every setting under the same protocol and the same fold split.
std::vector<AblationRow> run_ablation(std::span<const VideoRecord> videos, AblationAxis axis,
                                      const TrainConfig& base, const EvalProtocol& protocol,
                                      const SummaryOptions& options, std::span<const std::size_t> radii = {},
                                      const FoldSplits* splits = nullptr);

/// Columns: axis,setting,fscore,tau,rho
void write_ablation_csv(std::ostream& out, std::span<const AblationRow> rows);

}  // namespace sumdca
