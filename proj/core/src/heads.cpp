#include "sumdca/heads.hpp"

#include "sumdca/errors.hpp"
#include "sumdca/ops.hpp"

namespace sumdca {

HeadWeights HeadParams::bind(Tape& t) {
  return {t.parameter(score_hidden_w), t.parameter(score_hidden_b), t.parameter(score_out_w),
          t.parameter(score_out_b),    t.parameter(embed_w),        t.parameter(embed_b),
          t.parameter(recon_hidden_w), t.parameter(recon_hidden_b), t.parameter(recon_out_w),
          t.parameter(recon_out_b)};
}

HeadWeights HeadParams::bind_const(Tape& t) const {
  return {t.constant_ref(score_hidden_w.value), t.constant_ref(score_hidden_b.value),
          t.constant_ref(score_out_w.value),    t.constant_ref(score_out_b.value),
          t.constant_ref(embed_w.value),        t.constant_ref(embed_b.value),
          t.constant_ref(recon_hidden_w.value), t.constant_ref(recon_hidden_b.value),
          t.constant_ref(recon_out_w.value),    t.constant_ref(recon_out_b.value)};
}

Var score_frames(Var fused, const HeadWeights& w) {
  Var hidden = ops::relu(ops::add_row_broadcast(ops::matmul(fused, w.score_hidden_w), w.score_hidden_b));
  return ops::sigmoid(ops::add_row_broadcast(ops::matmul(hidden, w.score_out_w), w.score_out_b));
}

std::vector<double> score_frames(const Matrix& fused, const HeadParams& heads) {
  Tape tape;
  Var y = score_frames(tape.constant_ref(fused), heads.bind_const(tape));
  return {y.value().data().begin(), y.value().data().end()};
}

Var embed_frames(Var fused, const HeadWeights& w) {
  return ops::add_row_broadcast(ops::matmul(fused, w.embed_w), w.embed_b);
}

Var reconstruct_frames(Var fused, const HeadWeights& w, bool output_sigmoid) {
  Var hidden =
      ops::sigmoid(ops::add_row_broadcast(ops::matmul(fused, w.recon_hidden_w), w.recon_hidden_b));
  Var out = ops::add_row_broadcast(ops::matmul(hidden, w.recon_out_w), w.recon_out_b);
  return output_sigmoid ? ops::sigmoid(out) : out;
}

Var bce_loss(Var scores, std::span<const double> labels) {
  return ops::binary_cross_entropy(scores, labels, kBceEpsilon);
}

Var repelling_loss(Var embeddings) {
  const std::size_t t = embeddings.rows();
  if (t < 2) throw ContractError("repelling_loss: needs at least 2 frames, got " + std::to_string(t));
  Var unit = ops::row_normalize(embeddings);
  Var cosines = ops::matmul(unit, ops::transpose(unit));
  // Off-diagonal sum: total minus the (unit) self-similarities.
  Var off_diagonal = ops::subtract(ops::sum(cosines), ops::sum(ops::row_norms_squared(unit)));
  return ops::scale(off_diagonal, 1.0 / static_cast<double>(t * (t - 1)));
}

Var reconstruction_loss(Var features, Var reconstruction) {
  return ops::mean(ops::row_norms(ops::subtract(features, reconstruction)));
}

Var total_loss(const LossParts& parts, const LossWeights& w) {
  if (w.alpha < 0.0 || w.beta < 0.0) throw ContractError("total_loss: alpha and beta must be >= 0");
  std::optional<Var> acc;
  auto accumulate = [&acc](Var term) { acc = acc ? ops::add(*acc, term) : term; };
  if (w.supervised) {
    if (!parts.classification)
      throw ContractError("total_loss: supervised objective needs the classification term");
    accumulate(*parts.classification);
  }
  if (w.use_repelling) {
    if (!parts.repelling) throw ContractError("total_loss: repelling term missing");
    accumulate(ops::scale(*parts.repelling, w.alpha));
  }
  if (w.use_reconstruction) {
    if (!parts.reconstruction) throw ContractError("total_loss: reconstruction term missing");
    accumulate(ops::scale(*parts.reconstruction, w.beta));
  }
  if (!acc) throw ContractError("total_loss: every loss term is disabled");
  return *acc;
}

}  // namespace sumdca
