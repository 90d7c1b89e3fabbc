#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "sumdca/heads.hpp"
#include "sumdca/model.hpp"
#include "sumdca/video.hpp"

namespace sumdca {

struct TrainConfig {
  ModelConfig model;
  LossWeights loss;
  double learning_rate = 1e-4;
  double weight_decay = 1e-5;
  std::size_t epochs = 200;
  std::uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  /// Stop when the epoch loss has not improved by min_delta for `patience` epochs.
  bool early_stop = false;
  std::size_t patience = 20;
  double min_delta = 1e-5;

  void validate() const;
};

struct AdamState {
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::uint64_t step = 0;
};

AdamState make_adam_state(std::span<const Parameter* const> params);

struct AdamSettings {
  double learning_rate = 1e-4;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// One bias-corrected Adam update with decoupled weight decay
/// (theta -= lr * wd * theta, then the Adam step).
void adam_step(std::span<Parameter* const> params, AdamState& state, const AdamSettings& settings);

struct EpochStats {
  double total = 0.0;
  double classification = 0.0;
  double repelling = 0.0;
  double reconstruction = 0.0;
};

struct TrainHooks {
  /// Called with the video index whenever ground-truth labels are read.
  std::function<void(std::size_t)> on_label_access;
  std::function<void(std::size_t, const EpochStats&)> on_epoch_end;
};

struct TrainState {
  ModelParams params;
  AdamState adam;
  std::size_t epoch = 0;  // completed epochs
};

struct TrainResult {
  TrainState state;
  std::vector<EpochStats> history;
  std::size_t optimizer_steps = 0;
};

/// Per-video Adam training over a fixed epoch budget. Video order is
/// reshuffled each epoch from the seed, so runs are reproducible.
/// `resume` continues from a saved state instead of fresh initialization.
TrainResult train(std::span<const VideoRecord> videos, const TrainConfig& config,
                  const TrainHooks& hooks = {}, std::optional<TrainState> resume = std::nullopt);

/// Loss terms of one forward pass without touching gradients.
EpochStats evaluate_losses(const ModelParams& params, const VideoRecord& video, const LossWeights& w);

}  // namespace sumdca
