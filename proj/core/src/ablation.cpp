#include "sumdca/ablation.hpp"

#include <cstdio>
#include <ostream>

#include "sumdca/errors.hpp"

namespace sumdca {

std::string_view to_string(AblationAxis axis) {
  switch (axis) {
    case AblationAxis::kSimilarity: return "similarity";
    case AblationAxis::kRadius: return "radius";
    case AblationAxis::kLosses: return "losses";
    case AblationAxis::kModules: return "modules";
  }
  return "similarity";
}

AblationAxis parse_ablation_axis(std::string_view text) {
  if (text == "similarity") return AblationAxis::kSimilarity;
  if (text == "radius") return AblationAxis::kRadius;
  if (text == "losses") return AblationAxis::kLosses;
  if (text == "modules") return AblationAxis::kModules;
  throw ContractError("unknown ablation axis '" + std::string(text) +
                      "' (expected similarity, radius, losses or modules)");
}

std::vector<AblationSetting> ablation_settings(AblationAxis axis, const TrainConfig& base,
                                               std::span<const std::size_t> radii) {
  std::vector<AblationSetting> out;
  switch (axis) {
    case AblationAxis::kSimilarity:
      for (SimilarityKind k : {SimilarityKind::kDot, SimilarityKind::kCosine, SimilarityKind::kL2}) {
        TrainConfig c = base;
        c.model.similarity = k;
        out.push_back({std::string(to_string(k)), c});
      }
      break;
    case AblationAxis::kRadius: {
      static constexpr std::size_t kDefaultRadii[] = {1, 2, 3, 4};
      const std::span<const std::size_t> list = radii.empty() ? std::span<const std::size_t>(kDefaultRadii) : radii;
      for (std::size_t r : list) {
        TrainConfig c = base;
        c.model.neighbor_radius = r;
        c.model.use_lca = true;
        out.push_back({"R=" + std::to_string(r), c});
      }
      break;
    }
    case AblationAxis::kLosses: {
      struct Combo {
        const char* label;
        bool repel, recon;
      };
      for (const Combo& combo : {Combo{"cls", false, false}, Combo{"cls+div", true, false},
                                 Combo{"cls+rec", false, true}, Combo{"cls+div+rec", true, true}}) {
        TrainConfig c = base;
        c.loss.use_repelling = combo.repel;
        c.loss.use_reconstruction = combo.recon;
        std::string label = combo.label;
        if (!base.loss.supervised) {
          if (!combo.repel && !combo.recon) continue;
          label = label.substr(4);
        }
        out.push_back({label, c});
      }
      break;
    }
    case AblationAxis::kModules:
      for (int mask = 0; mask < 4; ++mask) {
        TrainConfig c = base;
        c.model.use_gda = (mask & 1) != 0;
        c.model.use_lca = (mask & 2) != 0;
        const char* labels[] = {"none", "gda", "lca", "gda+lca"};
        out.push_back({labels[mask], c});
      }
      break;
  }
  return out;
}

std::vector<AblationRow> run_ablation(std::span<const VideoRecord> videos, AblationAxis axis,
                                      const TrainConfig& base, const EvalProtocol& protocol,
                                      const SummaryOptions& options, std::span<const std::size_t> radii,
                                      const FoldSplits* splits) {
  FoldSplits shared;
  if (splits) {
    shared = *splits;
  } else {
    const std::string target = target_corpus(videos, protocol);
    std::vector<std::string> ids;
    for (const VideoRecord& v : videos)
      if (v.corpus == target) ids.push_back(v.id);
    shared = make_splits(ids, protocol.folds, protocol.seed);
  }
  std::vector<AblationRow> rows;
  for (const AblationSetting& s : ablation_settings(axis, base, radii)) {
    EvalReport r = evaluate(videos, s.config, protocol, options, &shared);
    r.method = s.label;
    rows.push_back({std::string(to_string(axis)), s.label, std::move(r)});
  }
  return rows;
}

void write_ablation_csv(std::ostream& out, std::span<const AblationRow> rows) {
  out << "axis,setting,fscore,tau,rho\n";
  for (const AblationRow& row : rows) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.6f,%.6f,%.6f", row.report.mean_fscore, row.report.mean_tau, row.report.mean_rho);
    out << row.axis << ',' << row.setting << ',' << buf << '\n';
  }
}

}  // namespace sumdca
