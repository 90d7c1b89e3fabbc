#include "sumdca/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <ostream>
#include <set>

#include <json.hpp>

#include "sumdca/errors.hpp"
#include "sumdca/random.hpp"

namespace sumdca {

std::string_view to_string(ProtocolMode mode) {
  switch (mode) {
    case ProtocolMode::kCanonical: return "canonical";
    case ProtocolMode::kAugmented: return "augmented";
    case ProtocolMode::kTransfer: return "transfer";
  }
  return "canonical";
}

ProtocolMode parse_protocol_mode(std::string_view text) {
  if (text == "canonical") return ProtocolMode::kCanonical;
  if (text == "augmented") return ProtocolMode::kAugmented;
  if (text == "transfer") return ProtocolMode::kTransfer;
  throw ContractError("unknown protocol '" + std::string(text) + "' (expected canonical, augmented or transfer)");
}

void EvalProtocol::validate() const {
  if (folds == 0) throw ContractError("evaluation: folds must be >= 1");
}

FoldSplits make_splits(std::span<const std::string> ids, std::size_t folds, std::uint64_t seed) {
  if (folds == 0) throw ContractError("make_splits: folds must be >= 1");
  if (ids.size() < folds)
    throw ContractError("make_splits: " + std::to_string(ids.size()) + " videos cannot fill " + std::to_string(folds) +
                        " folds");
  std::vector<std::string> order(ids.begin(), ids.end());
  Rng rng(derive_seed(seed, 0xf01d));
  rng.shuffle(order);
  FoldSplits s;
  s.seed = seed;
  s.folds.resize(folds);
  for (std::size_t i = 0; i < order.size(); ++i) s.folds[i % folds].push_back(order[i]);
  return s;
}

void save_splits(const std::filesystem::path& path, const FoldSplits& splits) {
  nlohmann::ordered_json j;
  j["seed"] = splits.seed;
  j["folds"] = splits.folds;
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError(DataErrorKind::kIo, "cannot write split file '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

FoldSplits load_splits(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(DataErrorKind::kIo, "cannot open split file '" + path.string() + "'");
  try {
    const nlohmann::json j = nlohmann::json::parse(in);
    FoldSplits s;
    s.seed = j.value("seed", std::uint64_t{0});
    s.folds = j.at("folds").get<std::vector<std::vector<std::string>>>();
    if (s.folds.empty()) throw DataError(DataErrorKind::kMalformed, path.string() + ": no folds");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(DataErrorKind::kMalformed, path.string() + ": " + e.what());
  }
}

std::vector<std::vector<std::uint8_t>> reference_summaries(const VideoRecord& video) {
  if (!video.user_summaries.empty()) return video.user_summaries;
  if (video.gt_binary) return {*video.gt_binary};
  throw ContractError("video '" + video.id + "' has neither user summaries nor binary labels");
}

VideoMetrics score_video(const VideoRecord& video, const SummaryMask& summary, UserAggregation agg) {
  VideoMetrics m;
  m.id = video.id;
  m.fscore = fscore_users(summary.mask, reference_summaries(video), agg);
  if (video.gt_scores) {
    m.has_importance = true;
    m.tau = kendall_tau(summary.frame_scores, *video.gt_scores);
    m.rho = spearman_rho(summary.frame_scores, *video.gt_scores);
  }
  return m;
}

std::vector<VideoMetrics> evaluate_params(std::span<const VideoRecord> videos, const ModelParams& params,
                                          UserAggregation agg, const SummaryOptions& options) {
  std::vector<VideoMetrics> out;
  out.reserve(videos.size());
  for (const VideoRecord& v : videos) out.push_back(score_video(v, generate_summary(v, params, options), agg));
  return out;
}

void finalize_report(EvalReport& r) {
  std::map<std::size_t, std::pair<double, std::size_t>> per_fold;
  r.mean_tau = r.mean_rho = 0.0;
  r.rank_videos = r.undefined_rank = 0;
  for (const VideoMetrics& m : r.videos) {
    auto& [sum, n] = per_fold[m.fold];
    sum += m.fscore;
    ++n;
    if (m.has_importance) {
      ++r.rank_videos;
      r.mean_tau += m.tau.value;
      r.mean_rho += m.rho.value;
      r.undefined_rank += (!m.tau.defined || !m.rho.defined) ? 1 : 0;
    }
  }
  r.mean_fscore = 0.0;
  for (const auto& [fold, acc] : per_fold) r.mean_fscore += acc.first / static_cast<double>(acc.second);
  if (!per_fold.empty()) r.mean_fscore /= static_cast<double>(per_fold.size());
  if (r.rank_videos > 0) {
    r.mean_tau /= static_cast<double>(r.rank_videos);
    r.mean_rho /= static_cast<double>(r.rank_videos);
  }
}

std::string target_corpus(std::span<const VideoRecord> videos, const EvalProtocol& protocol) {
  if (!protocol.target_corpus.empty()) return protocol.target_corpus;
  if (videos.empty()) throw ContractError("evaluation: no videos");
  return videos.front().corpus;
}

EvalReport evaluate(std::span<const VideoRecord> videos, const TrainConfig& config, const EvalProtocol& protocol,
                    const SummaryOptions& options, const FoldSplits* splits) {
  protocol.validate();
  const std::string target = target_corpus(videos, protocol);
  std::vector<std::size_t> target_idx, aux_idx;
  std::map<std::string, std::size_t> by_id;
  for (std::size_t i = 0; i < videos.size(); ++i) {
    (videos[i].corpus == target ? target_idx : aux_idx).push_back(i);
    if (videos[i].corpus == target && !by_id.emplace(videos[i].id, i).second)
      throw ContractError("evaluation: duplicate video id '" + videos[i].id + "'");
  }
  if (target_idx.empty()) throw ContractError("evaluation: no videos in target corpus '" + target + "'");
  if (protocol.mode == ProtocolMode::kTransfer && aux_idx.empty())
    throw ContractError("evaluation: transfer protocol needs videos outside the target corpus '" + target + "'");

  FoldSplits folds;
  if (splits) {
    folds = *splits;
  } else {
    std::vector<std::string> ids;
    for (std::size_t i : target_idx) ids.push_back(videos[i].id);
    folds = make_splits(ids, protocol.folds, protocol.seed);
  }
  const std::size_t fold_count = folds.folds.size();

  // Resolve test and train indices for every fold up front.
  std::vector<std::vector<std::size_t>> test_sets(fold_count), train_sets(fold_count);
  for (std::size_t f = 0; f < fold_count; ++f) {
    std::set<std::size_t> test;
    for (const std::string& id : folds.folds[f]) {
      const auto it = by_id.find(id);
      if (it == by_id.end()) throw ContractError("evaluation: split refers to unknown video '" + id + "'");
      test.insert(it->second);
    }
    test_sets[f].assign(test.begin(), test.end());
    if (protocol.mode != ProtocolMode::kTransfer) {
      for (std::size_t i : target_idx)
        if (fold_count == 1 || !test.contains(i)) train_sets[f].push_back(i);
    }
    if (protocol.mode != ProtocolMode::kCanonical)
      train_sets[f].insert(train_sets[f].end(), aux_idx.begin(), aux_idx.end());
    if (train_sets[f].empty()) throw ContractError("evaluation: fold " + std::to_string(f) + " has no training videos");
  }

  auto run_fold = [&](std::size_t f) {
    std::vector<VideoRecord> train_videos;
    for (std::size_t i : train_sets[f]) train_videos.push_back(videos[i]);
    TrainConfig fold_config = config;
    fold_config.seed = derive_seed(config.seed, f);
    const TrainResult trained = train(train_videos, fold_config);
    std::vector<VideoMetrics> out;
    for (std::size_t i : test_sets[f]) {
      VideoMetrics m =
          score_video(videos[i], generate_summary(videos[i], trained.state.params, options), protocol.agg);
      m.fold = f;
      out.push_back(std::move(m));
    }
    return out;
  };

  std::vector<std::vector<VideoMetrics>> results(fold_count);
  const std::size_t threads = std::max<std::size_t>(1, protocol.threads);
  for (std::size_t begin = 0; begin < fold_count; begin += threads) {
    const std::size_t end = std::min(fold_count, begin + threads);
    if (threads == 1) {
      results[begin] = run_fold(begin);
      continue;
    }
    std::vector<std::future<std::vector<VideoMetrics>>> pending;
    for (std::size_t f = begin; f < end; ++f) pending.push_back(std::async(std::launch::async, run_fold, f));
    for (std::size_t f = begin; f < end; ++f) results[f] = pending[f - begin].get();
  }

  EvalReport report;
  report.method = "model";
  report.protocol = protocol;
  report.protocol.target_corpus = target;
  report.protocol.folds = fold_count;
  report.budget_ratio = options.budget_ratio;
  for (auto& fold : results)
    for (auto& m : fold) report.videos.push_back(std::move(m));
  finalize_report(report);
  return report;
}

EvalReport random_baseline(std::span<const VideoRecord> videos, const EvalProtocol& protocol,
                           const SummaryOptions& options) {
  EvalReport report;
  report.method = "random";
  report.protocol = protocol;
  report.budget_ratio = options.budget_ratio;
  Rng rng(derive_seed(protocol.seed, 0x7a4d));
  for (const VideoRecord& v : videos) {
    std::vector<double> scores(v.frame_count());
    for (double& s : scores) s = rng.uniform();
    report.videos.push_back(score_video(v, summarize_scores(scores, video_partition(v, options), options.budget_ratio),
                                        protocol.agg));
  }
  finalize_report(report);
  return report;
}

EvalReport human_baseline(std::span<const VideoRecord> videos, const EvalProtocol& protocol) {
  EvalReport report;
  report.method = "human";
  report.protocol = protocol;
  for (const VideoRecord& v : videos) {
    if (v.user_summaries.size() < 2) continue;
    double total = 0.0;
    for (std::size_t u = 0; u < v.user_summaries.size(); ++u) {
      std::vector<std::vector<std::uint8_t>> others;
      for (std::size_t o = 0; o < v.user_summaries.size(); ++o)
        if (o != u) others.push_back(v.user_summaries[o]);
      total += fscore_users(v.user_summaries[u], others, protocol.agg);
    }
    VideoMetrics m;
    m.id = v.id;
    m.fscore = total / static_cast<double>(v.user_summaries.size());
    report.videos.push_back(std::move(m));
  }
  if (report.videos.empty()) throw ContractError("human baseline needs videos with at least two user summaries");
  finalize_report(report);
  return report;
}

namespace {

std::string num(double v, int precision) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

}  // namespace

void write_report_text(std::ostream& out, const EvalReport& r) {
  out << "method: " << r.method << '\n'
      << "protocol: " << to_string(r.protocol.mode) << ", folds=" << r.protocol.folds
      << ", aggregation=" << to_string(r.protocol.agg) << ", seed=" << r.protocol.seed;
  if (!r.protocol.target_corpus.empty()) out << ", target=" << r.protocol.target_corpus;
  out << "\nbudget ratio: " << num(r.budget_ratio, 3) << '\n';
  out << "video                            fold   F-score      tau      rho\n";
  for (const VideoMetrics& m : r.videos) {
    char line[160];
    std::snprintf(line, sizeof line, "%-32s %4zu %9.2f %8s %8s\n", m.id.c_str(), m.fold, m.fscore,
                  m.has_importance ? num(m.tau.value, 3).c_str() : "-",
                  m.has_importance ? num(m.rho.value, 3).c_str() : "-");
    out << line;
  }
  out << "mean F-score: " << num(r.mean_fscore, 2) << '\n';
  if (r.rank_videos > 0) {
    out << "mean Kendall tau: " << num(r.mean_tau, 3) << "  mean Spearman rho: " << num(r.mean_rho, 3) << '\n';
    if (r.undefined_rank > 0) out << "undefined correlations (constant input, counted as 0): " << r.undefined_rank << '\n';
  }
}

void write_report_csv(std::ostream& out, const EvalReport& r, bool header) {
  if (header) out << "method,video,fold,fscore,tau,tau_defined,rho,rho_defined\n";
  for (const VideoMetrics& m : r.videos) {
    out << r.method << ',' << m.id << ',' << m.fold << ',' << num(m.fscore, 6) << ',';
    if (m.has_importance)
      out << num(m.tau.value, 6) << ',' << m.tau.defined << ',' << num(m.rho.value, 6) << ',' << m.rho.defined;
    else
      out << ",0,,0";
    out << '\n';
  }
}

}  // namespace sumdca
