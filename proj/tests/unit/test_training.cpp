#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sumdca/errors.hpp"
#include "sumdca/synth.hpp"
#include "sumdca/training.hpp"
#include "test_support.hpp"

namespace sumdca {
namespace {

Dataset small_dataset(std::uint64_t seed, std::size_t videos = 3) {
  SynthSpec spec;
  spec.videos = videos;
  spec.frames = 20;
  spec.feature_dim = 8;
  spec.shots_per_video = 4;
  spec.seed = seed;
  return synth_generate(spec);
}

TrainConfig small_config(std::size_t epochs) {
  TrainConfig cfg;
  cfg.model.feature_dim = 8;
  cfg.learning_rate = 1e-3;
  cfg.epochs = epochs;
  cfg.seed = 11;
  return cfg;
}

bool same_params(const ModelParams& a, const ModelParams& b) {
  const auto pa = a.parameters();
  const auto pb = b.parameters();
  if (pa.size() != pb.size()) return false;
  for (std::size_t k = 0; k < pa.size(); ++k)
    if (!(pa[k]->value == pb[k]->value)) return false;
  return true;
}

TEST(Init, SameSeedIsBitIdentical) {
  ModelConfig cfg;
  cfg.feature_dim = 12;
  EXPECT_TRUE(same_params(init_params(cfg, 4), init_params(cfg, 4)));
  EXPECT_FALSE(same_params(init_params(cfg, 4), init_params(cfg, 5)));
}

TEST(Init, XavierBoundVarianceAndZeroBiases) {
  ModelConfig cfg;
  cfg.feature_dim = 64;
  const ModelParams p = init_params(cfg, 9);
  const Matrix& w = p.gda.query.value;
  const double bound = std::sqrt(6.0 / 128.0);
  double mean = 0, sq = 0;
  for (double v : w.data()) {
    EXPECT_LE(std::abs(v), bound);
    mean += v;
    sq += v * v;
  }
  const double n = static_cast<double>(w.size());
  const double var = sq / n - (mean / n) * (mean / n);
  EXPECT_NEAR(var, 2.0 / 128.0, 0.2 * 2.0 / 128.0);
  for (double b : p.heads.score_hidden_b.value.data()) EXPECT_EQ(b, 0.0);
  for (double b : p.heads.embed_b.value.data()) EXPECT_EQ(b, 0.0);
}

TEST(Adam, ZeroGradientWithoutDecayLeavesParametersUnchanged) {
  Parameter p("p", testing::random_matrix(1, 3, 3));
  const Matrix before = p.value;
  std::vector<Parameter*> list{&p};
  std::vector<const Parameter*> clist{&p};
  AdamState state = make_adam_state(clist);
  adam_step(list, state, AdamSettings{1e-2, 0.0});
  EXPECT_EQ(p.value, before);
  EXPECT_EQ(state.step, 1u);
}

TEST(Adam, FirstStepMovesAgainstGradientByLearningRate) {
  Parameter p("p", Matrix{{1.0, -2.0, 0.5}});
  p.grad = Matrix{{0.3, -4.0, 1e-3}};
  std::vector<Parameter*> list{&p};
  std::vector<const Parameter*> clist{&p};
  AdamState state = make_adam_state(clist);
  adam_step(list, state, AdamSettings{1e-3, 0.0});
  EXPECT_NEAR(p.value(0, 0), 1.0 - 1e-3, 1e-9);
  EXPECT_NEAR(p.value(0, 1), -2.0 + 1e-3, 1e-9);
  EXPECT_NEAR(p.value(0, 2), 0.5 - 1e-3, 1e-7);
}

TEST(Adam, DecoupledWeightDecayShrinksParameters) {
  Parameter p("p", Matrix{{2.0}});
  std::vector<Parameter*> list{&p};
  std::vector<const Parameter*> clist{&p};
  AdamState state = make_adam_state(clist);
  adam_step(list, state, AdamSettings{0.1, 0.5});
  EXPECT_DOUBLE_EQ(p.value(0, 0), 2.0 - 0.1 * 0.5 * 2.0);
}

TEST(Adam, MissingGradientIsAContractError) {
  Parameter p("p", Matrix{{1.0}});
  p.grad = Matrix();
  std::vector<Parameter*> list{&p};
  AdamState state;
  state.first_moment.emplace_back(1, 1);
  state.second_moment.emplace_back(1, 1);
  EXPECT_THROW(adam_step(list, state, AdamSettings{}), ContractError);
}

TEST(Adam, MinimisesSquareFromOne) {
  Parameter p("theta", Matrix{{1.0}});
  std::vector<Parameter*> list{&p};
  std::vector<const Parameter*> clist{&p};
  AdamState state = make_adam_state(clist);
  for (int i = 0; i < 200; ++i) {
    p.grad(0, 0) = 2.0 * p.value(0, 0);
    adam_step(list, state, AdamSettings{0.05, 0.0});
  }
  EXPECT_LT(std::abs(p.value(0, 0)), 0.1);
}

TEST(Train, ZeroEpochsAndEmptyInputAreRejected) {
  const Dataset ds = small_dataset(1);
  EXPECT_THROW(train(ds.videos, small_config(0)), ContractError);
  EXPECT_THROW(train(std::span<const VideoRecord>(), small_config(1)), ContractError);
}

TEST(Train, SupervisedNeedsLabels) {
  Dataset ds = small_dataset(1);
  ds.videos[1].gt_binary.reset();
  EXPECT_THROW(train(ds.videos, small_config(1)), ContractError);
}

TEST(Train, FeatureDimensionMismatchIsAShapeError) {
  const Dataset ds = small_dataset(1);
  TrainConfig cfg = small_config(1);
  cfg.model.feature_dim = 4;
  EXPECT_THROW(train(ds.videos, cfg), ShapeError);
}

TEST(Train, OneEpochOnOneVideoIsOneStep) {
  const Dataset ds = small_dataset(2, 1);
  const TrainResult r = train(ds.videos, small_config(1));
  EXPECT_EQ(r.optimizer_steps, 1u);
  EXPECT_EQ(r.state.adam.step, 1u);
  EXPECT_EQ(r.history.size(), 1u);
}

TEST(Train, DeterministicHistories) {
  const Dataset ds = small_dataset(3);
  const TrainResult a = train(ds.videos, small_config(5));
  const TrainResult b = train(ds.videos, small_config(5));
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t e = 0; e < a.history.size(); ++e) EXPECT_EQ(a.history[e].total, b.history[e].total);
  EXPECT_TRUE(same_params(a.state.params, b.state.params));
}

TEST(Train, UnsupervisedNeverReadsLabels) {
  const Dataset ds = small_dataset(4);
  TrainConfig cfg = small_config(3);
  cfg.loss.supervised = false;
  std::size_t reads = 0;
  TrainHooks hooks;
  hooks.on_label_access = [&](std::size_t) { ++reads; };
  train(ds.videos, cfg, hooks);
  EXPECT_EQ(reads, 0u);

  cfg.loss.supervised = true;
  train(ds.videos, cfg, hooks);
  EXPECT_EQ(reads, 9u);
}

TEST(Train, ZeroAuxiliaryWeightsEqualBceOnlyRun) {
  const Dataset ds = small_dataset(5);
  TrainConfig zero = small_config(3);
  zero.loss.alpha = 0.0;
  zero.loss.beta = 0.0;
  TrainConfig bce_only = small_config(3);
  bce_only.loss.use_repelling = false;
  bce_only.loss.use_reconstruction = false;
  const TrainResult a = train(ds.videos, zero);
  const TrainResult b = train(ds.videos, bce_only);
  for (std::size_t e = 0; e < 3; ++e) EXPECT_EQ(a.history[e].classification, b.history[e].classification);
  const auto pa = a.state.params.parameters();
  const auto pb = b.state.params.parameters();
  for (std::size_t k = 0; k < pa.size(); ++k) {
    const std::string& n = pa[k]->name;
    if (n.rfind("embed", 0) == 0 || n.rfind("recon", 0) == 0) continue;
    EXPECT_EQ(pa[k]->value, pb[k]->value) << n;
  }
}

TEST(Train, ResumeMatchesUninterruptedRun) {
  const Dataset ds = small_dataset(6);
  const TrainResult full = train(ds.videos, small_config(4));
  const TrainResult first = train(ds.videos, small_config(2));
  const TrainResult rest = train(ds.videos, small_config(2), {}, first.state);
  EXPECT_EQ(rest.state.epoch, 4u);
  EXPECT_EQ(rest.state.adam.step, full.state.adam.step);
  EXPECT_TRUE(same_params(full.state.params, rest.state.params));
  EXPECT_EQ(rest.history.back().total, full.history.back().total);
}

TEST(Train, EarlyStopEndsBeforeTheEpochBudget) {
  const Dataset ds = small_dataset(7);
  TrainConfig cfg = small_config(200);
  cfg.early_stop = true;
  cfg.patience = 1;
  cfg.min_delta = 1e9;
  const TrainResult r = train(ds.videos, cfg);
  EXPECT_EQ(r.history.size(), 2u);
}

TEST(EvaluateLosses, DoesNotChangeParameters) {
  const Dataset ds = small_dataset(8);
  const TrainResult r = train(ds.videos, small_config(1));
  const ModelParams before = r.state.params;
  const EpochStats s = evaluate_losses(r.state.params, ds.videos[0], LossWeights{});
  EXPECT_GT(s.total, 0.0);
  EXPECT_TRUE(same_params(before, r.state.params));
}

}  // namespace
}  // namespace sumdca
