#pragma once

#include <string>

#include "sumdca/training.hpp"

namespace sumdca {

/// Checkpoint container, version 1 (all integers little-endian):
///   "SDCACKPT"  u32 version
///   string      config (key = value text, model section resolved)
///   u64 epoch   u64 adam_step   u32 flags (bit 0: reconstruction output sigmoid)
///   u32 count, then per parameter:
///     string name  u64 rows  u64 cols  f64[rows*cols] value  f64[..] m  f64[..] v
struct Checkpoint {
  TrainConfig config;
  TrainState state;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const std::string& path, const TrainConfig& config, const TrainState& state);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace sumdca
