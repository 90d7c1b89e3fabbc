#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>
#include <vector>

#include "sumdca/ablation.hpp"
#include "sumdca/errors.hpp"
#include "sumdca/evaluation.hpp"
#include "sumdca/rank_metrics.hpp"
#include "sumdca/synth.hpp"
#include "test_support.hpp"

namespace sumdca {
namespace {

using Mask = std::vector<std::uint8_t>;

/// Tau-b by direct pair enumeration.
double pair_tau(const std::vector<double>& x, const std::vector<double>& y) {
  double conc = 0, disc = 0, tx = 0, ty = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double a = x[i] - x[j], b = y[i] - y[j];
      if (a == 0 && b == 0) continue;
      if (a == 0) ++tx;
      else if (b == 0) ++ty;
      else if (a * b > 0) ++conc;
      else ++disc;
    }
  return (conc - disc) / std::sqrt((conc + disc + tx) * (conc + disc + ty));
}

TEST(FScore, Examples) {
  EXPECT_DOUBLE_EQ(fscore(Mask{1, 1, 0, 0}, Mask{1, 1, 0, 0}), 100.0);
  EXPECT_DOUBLE_EQ(fscore(Mask{1, 1, 0, 0}, Mask{0, 0, 1, 1}), 0.0);
  EXPECT_NEAR(fscore(Mask{1, 1, 0, 0}, Mask{1, 0, 0, 0}), 200.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(fscore(Mask{0, 0, 0}, Mask{1, 0, 0}), 0.0);
  EXPECT_THROW(fscore(Mask{1, 0}, Mask{1, 0, 0}), ContractError);
}

TEST(FScore, IsSymmetric) {
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    Mask a(20), b(20);
    for (auto& v : a) v = rng.uniform() < 0.3;
    for (auto& v : b) v = rng.uniform() < 0.3;
    EXPECT_DOUBLE_EQ(fscore(a, b), fscore(b, a));
  }
}

TEST(FScore, UserAggregation) {
  const std::vector<Mask> users{{1, 1, 0, 0}, {0, 0, 1, 1}};
  EXPECT_DOUBLE_EQ(fscore_users(Mask{1, 1, 0, 0}, users, UserAggregation::kMax), 100.0);
  EXPECT_DOUBLE_EQ(fscore_users(Mask{1, 1, 0, 0}, users, UserAggregation::kMean), 50.0);
  EXPECT_EQ(parse_aggregation("mean"), UserAggregation::kMean);
  EXPECT_THROW(parse_aggregation("median"), ContractError);
}

TEST(RankCorrelation, HandExample) {
  const std::vector<double> x{1, 2, 3, 4, 5};
  const std::vector<double> y{2, 1, 4, 3, 5};
  EXPECT_NEAR(kendall_tau(x, y).value, 0.6, 1e-15);
  EXPECT_NEAR(spearman_rho(x, y).value, 0.8, 1e-15);
}

TEST(RankCorrelation, IdenticalAndReversedAreExact) {
  const std::vector<double> x{0.3, 0.1, 0.7, 0.7, 0.2};
  std::vector<double> r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = -x[i];
  EXPECT_EQ(kendall_tau(x, x).value, 1.0);
  EXPECT_EQ(spearman_rho(x, x).value, 1.0);
  EXPECT_EQ(kendall_tau(x, r).value, -1.0);
  EXPECT_EQ(spearman_rho(x, r).value, -1.0);
}

TEST(RankCorrelation, TauMatchesPairEnumerationWithTies) {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> x(25), y(25);
    for (double& v : x) v = static_cast<double>(rng.index(6));
    for (double& v : y) v = static_cast<double>(rng.index(4));
    EXPECT_NEAR(kendall_tau(x, y).value, pair_tau(x, y), 1e-12);
  }
}

TEST(RankCorrelation, InvariantUnderMonotoneTransforms) {
  Rng rng(6);
  std::vector<double> x(30), y(30), fx(30);
  for (std::size_t i = 0; i < 30; ++i) {
    x[i] = rng.uniform(0.0, 1.0);
    y[i] = rng.uniform(0.0, 1.0);
    fx[i] = std::exp(3.0 * x[i]) - 7.0;
  }
  EXPECT_NEAR(kendall_tau(x, y).value, kendall_tau(fx, y).value, 1e-15);
  EXPECT_NEAR(spearman_rho(x, y).value, spearman_rho(fx, y).value, 1e-15);
}

TEST(RankCorrelation, ConstantInputIsUndefined) {
  const std::vector<double> c(6, 0.5);
  const std::vector<double> x{1, 2, 3, 4, 5, 6};
  const RankCorrelation t = kendall_tau(c, x);
  EXPECT_FALSE(t.defined);
  EXPECT_EQ(t.value, 0.0);
  EXPECT_FALSE(spearman_rho(x, c).defined);
}

TEST(RankCorrelation, AverageRanks) {
  const std::vector<double> v{10, 20, 10, 30};
  EXPECT_EQ(average_ranks(v), (std::vector<double>{1.5, 3, 1.5, 4}));
}

Dataset eval_dataset(std::uint64_t seed, std::size_t videos, const std::string& corpus = "synthetic") {
  SynthSpec spec;
  spec.videos = videos;
  spec.frames = 30;
  spec.feature_dim = 8;
  spec.shots_per_video = 6;
  spec.seed = seed;
  spec.corpus = corpus;
  spec.name = corpus;
  return synth_generate(spec);
}

TrainConfig eval_config(std::size_t epochs) {
  TrainConfig cfg;
  cfg.model.feature_dim = 8;
  cfg.learning_rate = 1e-3;
  cfg.epochs = epochs;
  cfg.seed = 1;
  return cfg;
}

std::vector<std::string> ids_of(const Dataset& ds) {
  std::vector<std::string> ids;
  for (const auto& v : ds.videos) ids.push_back(v.id);
  return ids;
}

TEST(Splits, SeededAndCoveringEveryVideoOnce) {
  const Dataset ds = eval_dataset(1, 12);
  const auto ids = ids_of(ds);
  const FoldSplits a = make_splits(ids, 5, 42);
  EXPECT_EQ(a, make_splits(ids, 5, 42));
  EXPECT_NE(a, make_splits(ids, 5, 43));
  std::vector<std::string> all;
  for (const auto& f : a.folds) {
    EXPECT_GE(f.size(), 2u);
    all.insert(all.end(), f.begin(), f.end());
  }
  std::sort(all.begin(), all.end());
  EXPECT_EQ(all, ids);
  EXPECT_THROW(make_splits(ids, 13, 1), ContractError);
}

TEST(Splits, JsonRoundTrip) {
  const Dataset ds = eval_dataset(2, 7);
  const FoldSplits s = make_splits(ids_of(ds), 3, 9);
  const auto path = std::filesystem::temp_directory_path() / "sumdca_splits_test.json";
  save_splits(path, s);
  EXPECT_EQ(load_splits(path), s);
  std::filesystem::remove(path);
}

TEST(Evaluate, TrainedOnTestBeatsRandomParameters) {
  const Dataset ds = eval_dataset(3, 4);
  EvalProtocol protocol;
  protocol.folds = 1;
  const EvalReport trained = evaluate(ds.videos, eval_config(100), protocol, SummaryOptions{});
  ModelConfig mc = eval_config(1).model;
  mc.recon_sigmoid = ReconSigmoid::kOn;
  const ModelParams random_params = init_params(mc, 77);
  EvalReport untrained;
  untrained.videos = evaluate_params(ds.videos, random_params, protocol.agg, SummaryOptions{});
  finalize_report(untrained);
  EXPECT_GT(trained.mean_fscore, untrained.mean_fscore);
}

TEST(Evaluate, EvaluationLeavesParametersUnchanged) {
  const Dataset ds = eval_dataset(4, 3);
  ModelConfig mc = eval_config(1).model;
  const ModelParams p = init_params(mc, 5);
  const ModelParams copy = p;
  evaluate_params(ds.videos, p, UserAggregation::kMax, SummaryOptions{});
  const auto a = p.parameters();
  const auto b = copy.parameters();
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k]->value, b[k]->value);
}

TEST(Evaluate, ThreadedFoldsMatchSequential) {
  const Dataset ds = eval_dataset(5, 6);
  EvalProtocol protocol;
  protocol.folds = 3;
  const EvalReport seq = evaluate(ds.videos, eval_config(2), protocol, SummaryOptions{});
  protocol.threads = 3;
  const EvalReport par = evaluate(ds.videos, eval_config(2), protocol, SummaryOptions{});
  EXPECT_EQ(seq.mean_fscore, par.mean_fscore);
  EXPECT_EQ(seq.mean_tau, par.mean_tau);
  ASSERT_EQ(seq.videos.size(), 6u);
}

TEST(Evaluate, TransferWithoutOtherCorporaIsRejected) {
  const Dataset ds = eval_dataset(6, 4);
  EvalProtocol protocol;
  protocol.mode = ProtocolMode::kTransfer;
  protocol.folds = 2;
  EXPECT_THROW(evaluate(ds.videos, eval_config(1), protocol, SummaryOptions{}), ContractError);
}

TEST(Evaluate, TransferTestsOnlyTheTargetCorpus) {
  Dataset target = eval_dataset(7, 4, "alpha");
  const Dataset aux = eval_dataset(8, 3, "beta");
  std::vector<VideoRecord> videos = target.videos;
  videos.insert(videos.end(), aux.videos.begin(), aux.videos.end());
  EvalProtocol protocol;
  protocol.mode = ProtocolMode::kTransfer;
  protocol.folds = 2;
  protocol.target_corpus = "alpha";
  const EvalReport r = evaluate(videos, eval_config(1), protocol, SummaryOptions{});
  ASSERT_EQ(r.videos.size(), 4u);
  for (const auto& m : r.videos) EXPECT_EQ(m.id.rfind("alpha", 0), 0u) << m.id;
}

TEST(Baselines, RandomAndHuman) {
  const Dataset ds = eval_dataset(9, 5);
  EvalProtocol protocol;
  protocol.folds = 1;
  const EvalReport rnd = random_baseline(ds.videos, protocol, SummaryOptions{});
  EXPECT_EQ(rnd.videos.size(), 5u);
  EXPECT_GE(rnd.mean_fscore, 0.0);
  EXPECT_LE(rnd.mean_fscore, 100.0);
  const EvalReport human = human_baseline(ds.videos, protocol);
  EXPECT_GT(human.mean_fscore, 0.0);
  for (const auto& m : human.videos) EXPECT_FALSE(m.tau.defined);
}

TEST(Report, CsvHeaderAndRows) {
  EvalReport r;
  r.method = "m";
  VideoMetrics v;
  v.id = "x";
  v.fscore = 50.0;
  r.videos.push_back(v);
  finalize_report(r);
  std::ostringstream out;
  write_report_csv(out, r);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "method,video,fold,fscore,tau,tau_defined,rho,rho_defined");
  EXPECT_DOUBLE_EQ(r.mean_fscore, 50.0);
}

TEST(Ablation, SettingsEnumerateEachAxis) {
  const TrainConfig base = eval_config(1);
  EXPECT_EQ(ablation_settings(AblationAxis::kSimilarity, base, {}).size(), 3u);
  EXPECT_EQ(ablation_settings(AblationAxis::kModules, base, {}).size(), 4u);
  EXPECT_EQ(ablation_settings(AblationAxis::kLosses, base, {}).size(), 4u);
  const std::vector<std::size_t> radii{1, 3};
  EXPECT_EQ(ablation_settings(AblationAxis::kRadius, base, radii).size(), 2u);
  EXPECT_THROW(parse_ablation_axis("depth"), ContractError);
}

}  // namespace
}  // namespace sumdca
