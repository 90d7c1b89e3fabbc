#include "sumdca/model.hpp"

#include <cmath>
#include <string>

#include "sumdca/errors.hpp"
#include "sumdca/ops.hpp"
#include "sumdca/random.hpp"

namespace sumdca {

void ModelConfig::validate() const {
  if (feature_dim == 0) throw ContractError("model: feature_dim must be >= 1");
  if (use_lca && neighbor_radius == 0) throw ContractError("model: neighbor_radius must be >= 1");
  if (use_gda && use_positions && feature_dim % 2 != 0)
    throw ContractError("model: sinusoidal positions need an even feature_dim, got " +
                        std::to_string(feature_dim));
  if (scale_q < 0.0) throw ContractError("model: scale_q must be positive (or 0 for default)");
}

std::vector<Parameter*> ModelParams::parameters() {
  return {&gda.query,           &gda.key,           &gda.value,          &lca.query,
          &lca.key,             &lca.value,         &lca.rel_pos,        &heads.score_hidden_w,
          &heads.score_hidden_b, &heads.score_out_w, &heads.score_out_b, &heads.embed_w,
          &heads.embed_b,       &heads.recon_hidden_w, &heads.recon_hidden_b, &heads.recon_out_w,
          &heads.recon_out_b};
}

std::vector<const Parameter*> ModelParams::parameters() const {
  auto mutable_list = const_cast<ModelParams*>(this)->parameters();
  return {mutable_list.begin(), mutable_list.end()};
}

void ModelParams::zero_grad() {
  for (Parameter* p : parameters()) p->zero_grad();
}

namespace {

Parameter xavier(std::string name, std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix m(fan_in, fan_out);
  for (double& v : m.data()) v = rng.uniform(-bound, bound);
  return Parameter(std::move(name), std::move(m));
}

Parameter zeros(std::string name, std::size_t rows, std::size_t cols) {
  return Parameter(std::move(name), Matrix(rows, cols));
}

}  // namespace

ModelParams init_params(const ModelConfig& config, std::uint64_t seed) {
  config.validate();
  const std::size_t d = config.feature_dim;
  const std::size_t h = config.effective_hidden();
  const std::size_t slots = 2 * std::max<std::size_t>(config.neighbor_radius, 1) + 1;
  Rng rng(seed);

  ModelParams p;
  p.config = config;
  p.gda.query = xavier("gda.query", d, d, rng);
  p.gda.key = xavier("gda.key", d, d, rng);
  p.gda.value = xavier("gda.value", d, d, rng);
  p.gda.similarity = config.similarity;
  p.gda.scale_q = config.scale_q;

  p.lca.query = xavier("lca.query", d, d, rng);
  p.lca.key = xavier("lca.key", d, d, rng);
  p.lca.value = xavier("lca.value", d, d, rng);
  p.lca.rel_pos = xavier("lca.rel_pos", slots, d, rng);
  p.lca.radius = config.neighbor_radius;
  p.lca.variant = config.lca_variant;
  p.lca.window = config.window;

  p.heads.score_hidden_w = xavier("score.hidden_w", d, h, rng);
  p.heads.score_hidden_b = zeros("score.hidden_b", 1, h);
  p.heads.score_out_w = xavier("score.out_w", h, 1, rng);
  p.heads.score_out_b = zeros("score.out_b", 1, 1);
  p.heads.embed_w = xavier("embed.w", d, d, rng);
  p.heads.embed_b = zeros("embed.b", 1, d);
  p.heads.recon_hidden_w = xavier("recon.hidden_w", d, d, rng);
  p.heads.recon_hidden_b = zeros("recon.hidden_b", 1, d);
  p.heads.recon_out_w = xavier("recon.out_w", d, d, rng);
  p.heads.recon_out_b = zeros("recon.out_b", 1, d);
  p.heads.recon_output_sigmoid = config.recon_sigmoid != ReconSigmoid::kOff;
  return p;
}

ModelWeights bind(Tape& tape, ModelParams& params) {
  return {params.gda.bind(tape), params.lca.bind(tape), params.heads.bind(tape)};
}

ModelWeights bind_const(Tape& tape, const ModelParams& params) {
  return {params.gda.bind_const(tape), params.lca.bind_const(tape), params.heads.bind_const(tape)};
}

ForwardPass model_forward(Var features, const ModelWeights& weights, const ModelParams& params) {
  const ModelConfig& cfg = params.config;
  if (features.cols() != cfg.feature_dim)
    throw ShapeError("model_forward: features have dimension " + std::to_string(features.cols()) +
                     ", model expects " + std::to_string(cfg.feature_dim));
  ForwardPass fp;
  Var fused = features;
  if (cfg.use_gda) {
    Matrix positions;
    if (cfg.use_positions) positions = sinusoidal_positions(features.rows(), cfg.feature_dim);
    AttentionOutput g = gda_forward(features, weights.gda, params.gda.similarity,
                                    params.gda.effective_scale(cfg.feature_dim),
                                    cfg.use_positions ? &positions : nullptr);
    fused = ops::add(fused, g.features);
    fp.gda_weights = std::move(g.weights);
  }
  if (cfg.use_lca) {
    AttentionOutput l = lca_forward(features, weights.lca, params.lca.radius, params.lca.variant,
                                    params.lca.window);
    fused = ops::add(fused, l.features);
    fp.lca_weights = std::move(l.weights);
  }
  fp.fused = fused;
  fp.scores = score_frames(fused, weights.heads);
  fp.embeddings = embed_frames(fused, weights.heads);
  fp.reconstruction = reconstruct_frames(fused, weights.heads, params.heads.recon_output_sigmoid);
  return fp;
}

std::vector<double> predict_scores(const ModelParams& params, const Matrix& features) {
  Tape tape;
  ForwardPass fp = model_forward(tape.constant_ref(features), bind_const(tape, params), params);
  return {fp.scores.value().data().begin(), fp.scores.value().data().end()};
}

}  // namespace sumdca
