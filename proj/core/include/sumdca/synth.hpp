#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "sumdca/dataset.hpp"

namespace sumdca {

struct SynthSpec {
  std::size_t videos = 5;
  std::size_t frames = 40;
  std::size_t feature_dim = 16;
  std::size_t shots_per_video = 8;
  double noise = 0.05;
  std::uint64_t seed = 0;
  std::size_t users = 3;
  double budget_ratio = 0.15;
  std::string name = "synthetic";
  std::string corpus = "synthetic";
  void validate() const;
};

/// Piecewise-constant shot prototypes in [0, 1]^d plus Gaussian noise
/// (clipped to [0, 1]). One shot per video that fits the budget is a key shot:
/// its prototype lies near a prototype shared by all videos and its frames
/// carry high importance. Labels are the knapsack binarization of the
/// importance scores on the planted partition; user summaries binarize
/// independently perturbed copies of the scores. Deterministic in `seed`.
Dataset synth_generate(const SynthSpec& spec);

}  // namespace sumdca
