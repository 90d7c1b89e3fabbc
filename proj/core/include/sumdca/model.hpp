#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sumdca/attention.hpp"
#include "sumdca/heads.hpp"
#include "sumdca/matrix.hpp"
#include "sumdca/tape.hpp"

namespace sumdca {

enum class ReconSigmoid { kAuto, kOn, kOff };

/// Architecture switches. Defaults follow the full model: both attention
/// branches, l2 similarity, sinusoidal positions on the global branch.
struct ModelConfig {
  std::size_t feature_dim = 1024;
  std::size_t hidden_dim = 0;  // 0 = feature_dim
  SimilarityKind similarity = SimilarityKind::kL2;
  double scale_q = 0.0;  // 0 = feature_dim
  std::size_t neighbor_radius = 2;
  LcaVariant lca_variant = LcaVariant::kContextual;
  WindowPolicy window = WindowPolicy::kClamp;
  bool use_gda = true;
  bool use_lca = true;
  bool use_positions = true;
  /// kAuto turns the final reconstruction sigmoid on only when every training
  /// feature lies in [0, 1].
  ReconSigmoid recon_sigmoid = ReconSigmoid::kAuto;

  std::size_t effective_hidden() const { return hidden_dim == 0 ? feature_dim : hidden_dim; }
  void validate() const;
};

struct ModelParams {
  ModelConfig config;
  GdaParams gda;
  LcaParams lca;
  HeadParams heads;

  /// Every trainable parameter in a fixed order (checkpoint and optimizer order).
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
  void zero_grad();
};

/// Xavier-uniform weights (bound sqrt(6 / (fan_in + fan_out))), zero biases.
/// Deterministic in `seed`.
ModelParams init_params(const ModelConfig& config, std::uint64_t seed);

struct ModelWeights {
  GdaWeights gda;
  LcaWeights lca;
  HeadWeights heads;
};

ModelWeights bind(Tape& tape, ModelParams& params);
ModelWeights bind_const(Tape& tape, const ModelParams& params);

struct ForwardPass {
  Var fused;           // T x d
  Var scores;          // T x 1
  Var embeddings;      // T x d
  Var reconstruction;  // T x d
  Matrix gda_weights;  // empty when the branch is off
  Matrix lca_weights;
};

ForwardPass model_forward(Var features, const ModelWeights& weights, const ModelParams& params);

/// Inference-only frame scores.
std::vector<double> predict_scores(const ModelParams& params, const Matrix& features);

}  // namespace sumdca
