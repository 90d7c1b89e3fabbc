#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "sumdca/matrix.hpp"
#include "sumdca/tape.hpp"

namespace sumdca {

struct HeadWeights {
  Var score_hidden_w, score_hidden_b, score_out_w, score_out_b;
  Var embed_w, embed_b;
  Var recon_hidden_w, recon_hidden_b, recon_out_w, recon_out_b;
};

/// Output heads on top of the fused features:
///  - score:  d -> hidden (ReLU) -> 1 (sigmoid)
///  - embed:  d -> d, affine, no activation
///  - recon:  d -> d (sigmoid) -> d (optional sigmoid)
struct HeadParams {
  Parameter score_hidden_w;
  Parameter score_hidden_b;
  Parameter score_out_w;
  Parameter score_out_b;
  Parameter embed_w;
  Parameter embed_b;
  Parameter recon_hidden_w;
  Parameter recon_hidden_b;
  Parameter recon_out_w;
  Parameter recon_out_b;
  /// The reconstruction can only hit targets in (0, 1) with a final sigmoid,
  /// so it is switched off for unbounded features.
  bool recon_output_sigmoid = true;

  HeadWeights bind(Tape& tape);
  HeadWeights bind_const(Tape& tape) const;
};

/// T x 1 frame importance scores in (0, 1).
Var score_frames(Var fused, const HeadWeights& w);
std::vector<double> score_frames(const Matrix& fused, const HeadParams& heads);

Var embed_frames(Var fused, const HeadWeights& w);
Var reconstruct_frames(Var fused, const HeadWeights& w, bool output_sigmoid);

struct LossWeights {
  double alpha = 0.1;
  double beta = 1.0;
  /// Supervised training adds the classification term; unsupervised omits it.
  bool supervised = true;
  bool use_repelling = true;
  bool use_reconstruction = true;
};

inline constexpr double kBceEpsilon = 1e-7;

/// Mean binary cross-entropy against 0/1 labels, scores clipped to [1e-7, 1-1e-7].
Var bce_loss(Var scores, std::span<const double> labels);
/// Mean pairwise cosine similarity over ordered pairs i != j. Needs T >= 2
/// and nonzero rows.
Var repelling_loss(Var embeddings);
/// Mean over frames of the (unsquared) Euclidean reconstruction error.
Var reconstruction_loss(Var features, Var reconstruction);

struct LossParts {
  std::optional<Var> classification;
  std::optional<Var> repelling;
  std::optional<Var> reconstruction;
};

/// Supervised: cls + alpha * d + beta * r. Unsupervised: alpha * d + beta * r.
/// Terms switched off in `w` are left out.
Var total_loss(const LossParts& parts, const LossWeights& w);

}  // namespace sumdca
