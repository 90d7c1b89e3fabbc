#include "sumdca/training.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <string>

#include "sumdca/errors.hpp"
#include "sumdca/ops.hpp"
#include "sumdca/random.hpp"

namespace sumdca {

void TrainConfig::validate() const {
  model.validate();
  if (!(learning_rate > 0.0)) throw ContractError("train: learning_rate must be > 0");
  if (weight_decay < 0.0) throw ContractError("train: weight_decay must be >= 0");
  if (epochs < 1) throw ContractError("train: epochs must be >= 1");
  if (loss.alpha < 0.0 || loss.beta < 0.0) throw ContractError("train: alpha and beta must be >= 0");
  if (!loss.supervised && !loss.use_repelling && !loss.use_reconstruction)
    throw ContractError("train: unsupervised training needs the repelling or reconstruction term");
}

AdamState make_adam_state(std::span<const Parameter* const> params) {
  AdamState s;
  for (const Parameter* p : params) {
    s.first_moment.emplace_back(p->value.rows(), p->value.cols());
    s.second_moment.emplace_back(p->value.rows(), p->value.cols());
  }
  return s;
}

void adam_step(std::span<Parameter* const> params, AdamState& state, const AdamSettings& settings) {
  if (state.first_moment.size() != params.size() || state.second_moment.size() != params.size())
    throw ContractError("adam_step: optimizer state does not match the parameter list");
  for (std::size_t k = 0; k < params.size(); ++k) {
    const Parameter& p = *params[k];
    if (!p.grad.same_shape(p.value))
      throw ContractError("adam_step: parameter '" + p.name + "' has no gradient");
    if (!state.first_moment[k].same_shape(p.value))
      throw ContractError("adam_step: moment shape mismatch for '" + p.name + "'");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(settings.beta1, t);
  const double c2 = 1.0 - std::pow(settings.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Parameter& p = *params[k];
    auto theta = p.value.data();
    auto g = p.grad.data();
    auto m = state.first_moment[k].data();
    auto v = state.second_moment[k].data();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      theta[i] -= settings.learning_rate * settings.weight_decay * theta[i];
      m[i] = settings.beta1 * m[i] + (1.0 - settings.beta1) * g[i];
      v[i] = settings.beta2 * v[i] + (1.0 - settings.beta2) * g[i] * g[i];
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      theta[i] -= settings.learning_rate * m_hat / (std::sqrt(v_hat) + settings.epsilon);
    }
  }
}

namespace {

bool features_in_unit_interval(std::span<const VideoRecord> videos) {
  for (const VideoRecord& v : videos)
    for (double x : v.features.data())
      if (x < 0.0 || x > 1.0) return false;
  return true;
}

std::vector<double> labels_of(const VideoRecord& v) {
  return {v.gt_binary->begin(), v.gt_binary->end()};
}

struct StepLosses {
  Var total;
  EpochStats parts;
};

StepLosses build_loss(const ForwardPass& fp, Var features, const LossWeights& w,
                      const std::vector<double>* labels) {
  LossParts parts;
  EpochStats values;
  if (w.supervised) {
    parts.classification = bce_loss(fp.scores, *labels);
    values.classification = parts.classification->scalar();
  }
  if (w.use_repelling) {
    parts.repelling = repelling_loss(fp.embeddings);
    values.repelling = parts.repelling->scalar();
  }
  if (w.use_reconstruction) {
    parts.reconstruction = reconstruction_loss(features, fp.reconstruction);
    values.reconstruction = parts.reconstruction->scalar();
  }
  Var total = total_loss(parts, w);
  values.total = total.scalar();
  return {total, values};
}

}  // namespace

TrainResult train(std::span<const VideoRecord> videos, const TrainConfig& config,
                  const TrainHooks& hooks, std::optional<TrainState> resume) {
  config.validate();
  if (videos.empty()) throw ContractError("train: empty video set");
  for (std::size_t i = 0; i < videos.size(); ++i) {
    const VideoRecord& v = videos[i];
    if (v.feature_dim() != config.model.feature_dim)
      throw ShapeError("train: video '" + v.id + "' has feature dimension " +
                       std::to_string(v.feature_dim()) + ", config expects " +
                       std::to_string(config.model.feature_dim));
    if (config.loss.use_repelling && v.frame_count() < 2)
      throw ContractError("train: video '" + v.id + "' has fewer than 2 frames");
    if (config.loss.supervised && !v.gt_binary)
      throw ContractError("train: supervised training but video '" + v.id + "' has no labels");
  }

  TrainResult result;
  if (resume) {
    result.state = std::move(*resume);
    if (result.state.params.config.feature_dim != config.model.feature_dim)
      throw ContractError("train: resumed model has a different feature dimension");
  } else {
    ModelConfig model_cfg = config.model;
    if (model_cfg.recon_sigmoid == ReconSigmoid::kAuto) {
      const bool bounded = features_in_unit_interval(videos);
      model_cfg.recon_sigmoid = bounded ? ReconSigmoid::kOn : ReconSigmoid::kOff;
      if (!bounded)
        std::cerr << "note: features fall outside [0,1]; reconstruction head runs without its "
                     "output sigmoid (set recon_sigmoid=on to force it)\n";
    }
    result.state.params = init_params(model_cfg, config.seed);
    auto list = result.state.params.parameters();
    std::vector<const Parameter*> const_list(list.begin(), list.end());
    result.state.adam = make_adam_state(const_list);
  }

  ModelParams& params = result.state.params;
  const std::vector<Parameter*> plist = params.parameters();
  const AdamSettings adam{config.learning_rate, config.weight_decay, config.adam_beta1,
                          config.adam_beta2, config.adam_epsilon};

  std::vector<std::size_t> order(videos.size());
  double best = HUGE_VAL;
  std::size_t since_best = 0;
  const std::size_t first_epoch = result.state.epoch;

  for (std::size_t epoch = first_epoch; epoch < first_epoch + config.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(config.seed, epoch));
    rng.shuffle(order);

    EpochStats sum;
    for (std::size_t vi : order) {
      const VideoRecord& video = videos[vi];
      std::vector<double> labels;
      if (config.loss.supervised) {
        if (hooks.on_label_access) hooks.on_label_access(vi);
        labels = labels_of(video);
      }
      params.zero_grad();
      Tape tape;
      Var x = tape.constant_ref(video.features);
      ForwardPass fp = model_forward(x, bind(tape, params), params);
      StepLosses step =
          build_loss(fp, x, config.loss, config.loss.supervised ? &labels : nullptr);
      tape.backward(step.total);
      adam_step(plist, result.state.adam, adam);
      ++result.optimizer_steps;

      sum.total += step.parts.total;
      sum.classification += step.parts.classification;
      sum.repelling += step.parts.repelling;
      sum.reconstruction += step.parts.reconstruction;
    }
    const double n = static_cast<double>(videos.size());
    EpochStats mean{sum.total / n, sum.classification / n, sum.repelling / n, sum.reconstruction / n};
    result.history.push_back(mean);
    result.state.epoch = epoch + 1;
    if (hooks.on_epoch_end) hooks.on_epoch_end(epoch, mean);

    if (config.early_stop) {
      if (mean.total < best - config.min_delta) {
        best = mean.total;
        since_best = 0;
      } else if (++since_best >= config.patience) {
        break;
      }
    }
  }
  return result;
}

EpochStats evaluate_losses(const ModelParams& params, const VideoRecord& video, const LossWeights& w) {
  Tape tape;
  Var x = tape.constant_ref(video.features);
  ForwardPass fp = model_forward(x, bind_const(tape, params), params);
  std::vector<double> labels;
  if (w.supervised) {
    if (!video.gt_binary) throw ContractError("evaluate_losses: video has no labels");
    labels = labels_of(video);
  }
  return build_loss(fp, x, w, w.supervised ? &labels : nullptr).parts;
}

}  // namespace sumdca
