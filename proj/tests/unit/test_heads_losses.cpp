#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sumdca/errors.hpp"
#include "sumdca/heads.hpp"
#include "sumdca/model.hpp"
#include "test_support.hpp"

namespace sumdca {
namespace {

using testing::op_gradients_match;
using testing::random_matrix;

Matrix column(std::vector<double> v) {
  const std::size_t n = v.size();
  return Matrix(n, 1, std::move(v));
}

TEST(ScoreHead, ZeroOutputLayerGivesOneHalf) {
  ModelConfig cfg;
  cfg.feature_dim = 6;
  ModelParams p = init_params(cfg, 3);
  p.heads.score_out_w.value.fill(0.0);
  p.heads.score_out_b.value.fill(0.0);
  for (double y : score_frames(random_matrix(4, 5, 6), p.heads)) EXPECT_EQ(y, 0.5);
}

TEST(ScoreHead, ScoresLieInUnitInterval) {
  ModelConfig cfg;
  cfg.feature_dim = 8;
  const ModelParams p = init_params(cfg, 5);
  for (double y : score_frames(random_matrix(6, 20, 8, -5, 5), p.heads)) {
    EXPECT_GT(y, 0.0);
    EXPECT_LT(y, 1.0);
  }
}

TEST(Bce, OneHalfEverywhereGivesLn2) {
  Tape tape;
  const std::vector<double> labels{1, 0, 0, 1, 1};
  EXPECT_NEAR(bce_loss(tape.constant(column({0.5, 0.5, 0.5, 0.5, 0.5})), labels).scalar(), std::log(2.0), 1e-12);
}

TEST(Bce, ExactPredictionIsNearZero) {
  Tape tape;
  const std::vector<double> labels{1, 0, 1};
  EXPECT_LE(bce_loss(tape.constant(column({1, 0, 1})), labels).scalar(), 1e-6);
}

TEST(Bce, MatchesNaiveFormula) {
  const Matrix y = random_matrix(10, 9, 1, 0.01, 0.99);
  const std::vector<double> labels{1, 0, 0, 1, 0, 1, 1, 0, 0};
  Tape tape;
  EXPECT_NEAR(bce_loss(tape.constant(y), labels).scalar(), oracle::naive_bce(y.data(), labels, kBceEpsilon), 1e-14);
}

TEST(Bce, RejectsLengthMismatch) {
  Tape tape;
  const std::vector<double> labels{1, 0};
  EXPECT_THROW(bce_loss(tape.constant(column({0.5, 0.5, 0.5})), labels), ShapeError);
}

TEST(Repelling, Examples) {
  Tape tape;
  EXPECT_NEAR(repelling_loss(tape.constant(Matrix{{1, 2}, {1, 2}, {1, 2}})).scalar(), 1.0, 1e-15);
  EXPECT_NEAR(repelling_loss(tape.constant(Matrix{{1, 0}, {0, 3}})).scalar(), 0.0, 1e-15);
  EXPECT_THROW(repelling_loss(tape.constant(Matrix{{1, 0}})), ContractError);
  EXPECT_THROW(repelling_loss(tape.constant(Matrix{{1, 0}, {0, 0}})), NumericError);
}

TEST(Repelling, MatchesNaivePairLoop) {
  const Matrix e = random_matrix(11, 7, 5);
  Tape tape;
  EXPECT_NEAR(repelling_loss(tape.constant(e)).scalar(), oracle::naive_repelling(e), 1e-14);
}

TEST(Reconstruction, Examples) {
  Tape tape;
  const Matrix x = random_matrix(12, 4, 3);
  EXPECT_EQ(reconstruction_loss(tape.constant(x), tape.constant(x)).scalar(), 0.0);
  EXPECT_DOUBLE_EQ(reconstruction_loss(tape.constant(Matrix{{3, 4}}), tape.constant(Matrix{{0, 0}})).scalar(), 5.0);
  const Matrix r = random_matrix(13, 4, 3);
  EXPECT_NEAR(reconstruction_loss(tape.constant(x), tape.constant(r)).scalar(), oracle::naive_reconstruction(x, r),
              1e-14);
}

TEST(LossGradients, MatchFiniteDifferences) {
  const std::vector<double> labels{1, 0, 1, 1, 0, 0};
  EXPECT_TRUE(op_gradients_match([&](Tape&, const std::vector<Var>& v) { return bce_loss(v[0], labels); },
                                 {random_matrix(20, 6, 1, 0.05, 0.95)}));
  EXPECT_TRUE(op_gradients_match([](Tape&, const std::vector<Var>& v) { return repelling_loss(v[0]); },
                                 {random_matrix(21, 6, 4)}));
  EXPECT_TRUE(op_gradients_match([](Tape&, const std::vector<Var>& v) { return reconstruction_loss(v[0], v[1]); },
                                 {random_matrix(22, 6, 4), random_matrix(23, 6, 4)}));
}

TEST(TotalLoss, Examples) {
  Tape tape;
  const Var cls = tape.constant(Matrix{{0.7}});
  const Var d = tape.constant(Matrix{{2.0}});
  const Var r = tape.constant(Matrix{{3.0}});

  LossWeights unsup;
  unsup.supervised = false;
  EXPECT_DOUBLE_EQ(total_loss({std::nullopt, d, r}, unsup).scalar(), 3.2);

  LossWeights only_cls;
  only_cls.alpha = 0.0;
  only_cls.beta = 0.0;
  EXPECT_DOUBLE_EQ(total_loss({cls, d, r}, only_cls).scalar(), 0.7);

  LossWeights sup;
  EXPECT_DOUBLE_EQ(total_loss({cls, d, r}, sup).scalar(), 0.7 + 0.2 + 3.0);
  EXPECT_THROW(total_loss({std::nullopt, d, r}, sup), ContractError);
}

TEST(TotalLoss, DisabledTermsAreLeftOut) {
  Tape tape;
  LossWeights w;
  w.use_repelling = false;
  EXPECT_DOUBLE_EQ(total_loss({tape.constant(Matrix{{1.0}}), std::nullopt, tape.constant(Matrix{{2.0}})}, w).scalar(),
                   3.0);
}

TEST(ModelForward, ShapesAndBranchSwitches) {
  ModelConfig cfg;
  cfg.feature_dim = 8;
  cfg.recon_sigmoid = ReconSigmoid::kOn;
  ModelParams p = init_params(cfg, 1);
  const Matrix x = random_matrix(30, 10, 8, 0, 1);
  Tape tape;
  const ForwardPass fp = model_forward(tape.constant(x), bind(tape, p), p);
  EXPECT_EQ(fp.scores.rows(), 10u);
  EXPECT_EQ(fp.scores.cols(), 1u);
  EXPECT_EQ(fp.embeddings.cols(), 8u);
  EXPECT_EQ(fp.gda_weights.rows(), 10u);
  EXPECT_EQ(fp.lca_weights.cols(), 5u);

  p.config.use_gda = false;
  p.config.use_lca = false;
  Tape bare;
  const ForwardPass none = model_forward(bare.constant(x), bind(bare, p), p);
  EXPECT_TRUE(none.gda_weights.empty());
  EXPECT_EQ(none.fused.value(), x);
}

TEST(ModelForward, FullObjectiveGradientMatchesFiniteDifferences) {
  ModelConfig cfg;
  cfg.feature_dim = 4;
  cfg.recon_sigmoid = ReconSigmoid::kOn;
  ModelParams p = init_params(cfg, 2);
  const Matrix x = random_matrix(31, 6, 4, 0, 1);
  const std::vector<double> labels{1, 0, 0, 1, 0, 1};
  const LossWeights w;
  auto loss_value = [&] {
    Tape tape;
    const Var xv = tape.constant(x);
    const ForwardPass fp = model_forward(xv, bind_const(tape, p), p);
    return total_loss({bce_loss(fp.scores, labels), repelling_loss(fp.embeddings),
                       reconstruction_loss(xv, fp.reconstruction)},
                      w)
        .scalar();
  };
  p.zero_grad();
  {
    Tape tape;
    const Var xv = tape.constant(x);
    const ForwardPass fp = model_forward(xv, bind(tape, p), p);
    tape.backward(total_loss(
        {bce_loss(fp.scores, labels), repelling_loss(fp.embeddings), reconstruction_loss(xv, fp.reconstruction)}, w));
  }
  oracle::GradCheck all;
  for (Parameter* param : p.parameters()) all.merge(oracle::check_gradient(param->value, param->grad, loss_value, param->name));
  EXPECT_TRUE(all.ok()) << all.failures << " of " << all.checked << "; worst " << all.worst;
}

}  // namespace
}  // namespace sumdca
