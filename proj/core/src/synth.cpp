#include "sumdca/synth.hpp"

#include <algorithm>
#include <vector>

#include "sumdca/errors.hpp"
#include "sumdca/random.hpp"
#include "sumdca/summary.hpp"

namespace sumdca {

void SynthSpec::validate() const {
  if (videos == 0 || frames == 0 || feature_dim == 0 || shots_per_video == 0)
    throw ContractError("synth: videos, frames, feature_dim and shots_per_video must be positive");
  if (shots_per_video > frames) throw ContractError("synth: more shots than frames");
  if (noise < 0.0) throw ContractError("synth: noise must be non-negative");
  summary_budget(budget_ratio, frames);
}

namespace {

/// Random composition of `frames` into `shots` positive parts.
std::vector<std::size_t> random_starts(Rng& rng, std::size_t frames, std::size_t shots) {
  std::vector<std::size_t> cuts(frames - 1);
  for (std::size_t i = 0; i < cuts.size(); ++i) cuts[i] = i + 1;
  rng.shuffle(cuts);
  cuts.resize(shots - 1);
  std::sort(cuts.begin(), cuts.end());
  cuts.insert(cuts.begin(), 0);
  return cuts;
}

double clip01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

Dataset synth_generate(const SynthSpec& spec) {
  spec.validate();
  const std::size_t d = spec.feature_dim;
  Rng shared(derive_seed(spec.seed, 0x5eed));
  std::vector<double> key_prototype(d);
  for (double& v : key_prototype) v = shared.uniform();

  Dataset ds;
  ds.name = spec.name;
  ds.feature_dim = d;
  ds.aggregation = UserAggregation::kMax;
  const std::size_t budget = summary_budget(spec.budget_ratio, spec.frames);

  for (std::size_t vi = 0; vi < spec.videos; ++vi) {
    Rng rng(derive_seed(spec.seed, vi + 1));
    ShotPartition part = ShotPartition::from_starts(random_starts(rng, spec.frames, spec.shots_per_video), spec.frames);

    std::vector<std::size_t> fitting;
    for (std::size_t s = 0; s < part.shot_count(); ++s)
      if (part.lengths[s] <= budget) fitting.push_back(s);
    std::size_t key = 0;
    if (!fitting.empty()) {
      key = fitting[rng.index(fitting.size())];
    } else if (budget > 0 && spec.shots_per_video > 1) {
      // No drawn shot fits: redraw with a key shot of exactly `budget` frames.
      const std::size_t key_len = std::min(budget, spec.frames - (spec.shots_per_video - 1));
      const ShotPartition rest = ShotPartition::from_starts(
          random_starts(rng, spec.frames - key_len, spec.shots_per_video - 1), spec.frames - key_len);
      key = rng.index(spec.shots_per_video);
      std::vector<std::size_t> starts;
      std::size_t at = 0;
      for (std::size_t s = 0; s < spec.shots_per_video; ++s) {
        starts.push_back(at);
        at += s == key ? key_len : rest.lengths[s < key ? s : s - 1];
      }
      part = ShotPartition::from_starts(std::move(starts), spec.frames);
    } else {
      key = static_cast<std::size_t>(std::min_element(part.lengths.begin(), part.lengths.end()) - part.lengths.begin());
    }

    VideoRecord v;
    char id[32];
    std::snprintf(id, sizeof id, "%s_%03zu", spec.corpus.c_str(), vi);
    v.id = id;
    v.corpus = spec.corpus;
    v.features = Matrix(spec.frames, d);
    std::vector<double> scores(spec.frames);
    for (std::size_t s = 0; s < part.shot_count(); ++s) {
      std::vector<double> proto(d);
      for (std::size_t j = 0; j < d; ++j)
        proto[j] = s == key ? clip01(key_prototype[j] + 0.1 * (rng.uniform() - 0.5)) : rng.uniform();
      const double importance = s == key ? rng.uniform(0.8, 1.0) : rng.uniform(0.0, 0.3);
      for (std::size_t t = part.starts[s]; t < part.starts[s] + part.lengths[s]; ++t) {
        for (std::size_t j = 0; j < d; ++j) {
          const double jitter = spec.noise > 0.0 ? spec.noise * rng.normal() : 0.0;
          v.features(t, j) = clip01(proto[j] + jitter);
        }
        scores[t] = importance;
      }
    }
    v.gt_binary = binarize_ground_truth(scores, part, spec.budget_ratio);
    for (std::size_t u = 0; u < spec.users; ++u) {
      std::vector<double> perturbed(scores);
      for (double& x : perturbed) x += 0.1 * rng.normal();
      v.user_summaries.push_back(binarize_ground_truth(perturbed, part, spec.budget_ratio));
    }
    v.gt_scores = std::move(scores);
    v.change_points = part;
    std::vector<std::uint64_t> picks(spec.frames);
    for (std::size_t t = 0; t < spec.frames; ++t) picks[t] = 15 * t;
    v.picks = std::move(picks);
    ds.videos.push_back(std::move(v));
  }
  return ds;
}

}  // namespace sumdca
