#include "sumdca/summary.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "sumdca/errors.hpp"
#include "sumdca/knapsack.hpp"

namespace sumdca {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::size_t summary_budget(double budget_ratio, std::size_t frame_count) {
  if (!(budget_ratio > 0.0 && budget_ratio <= 1.0))
    throw ContractError("budget ratio must lie in (0, 1], got " + fmt(budget_ratio));
  return static_cast<std::size_t>(std::floor(budget_ratio * static_cast<double>(frame_count)));
}

ShotPartition video_partition(const VideoRecord& video, const SummaryOptions& options) {
  if (video.change_points) {
    video.change_points->validate(video.frame_count());
    return *video.change_points;
  }
  const std::size_t cap = options.max_shots == 0 ? default_max_shots(video.frame_count()) : options.max_shots;
  return kts_segment(video.features, cap, options.kts);
}

SummaryMask summarize_scores(std::span<const double> frame_scores, const ShotPartition& part,
                             double budget_ratio) {
  SummaryMask s;
  s.frame_scores.assign(frame_scores.begin(), frame_scores.end());
  s.partition = part;
  s.shot_scores = shot_scores(frame_scores, part);
  s.budget = summary_budget(budget_ratio, frame_scores.size());
  s.selected_shots = knapsack_select(part.lengths, s.shot_scores, s.budget);
  s.mask.assign(frame_scores.size(), 0);
  for (std::size_t i = 0; i < part.shot_count(); ++i)
    if (s.selected_shots[i])
      for (std::size_t t = part.starts[i]; t < part.starts[i] + part.lengths[i]; ++t) s.mask[t] = 1;
  return s;
}

SummaryMask generate_summary(const VideoRecord& video, const ModelParams& params,
                             const SummaryOptions& options) {
  const std::vector<double> scores = predict_scores(params, video.features);
  return summarize_scores(scores, video_partition(video, options), options.budget_ratio);
}

std::vector<std::uint8_t> binarize_ground_truth(std::span<const double> frame_scores,
                                                const ShotPartition& part, double budget_ratio) {
  return summarize_scores(frame_scores, part, budget_ratio).mask;
}

void write_summary_csv(std::ostream& out, const std::string& video_id, const SummaryMask& s) {
  out << "# video=" << video_id << '\n';
  out << "# budget=" << s.budget << '\n';
  out << "# change_points=";
  for (std::size_t i = 0; i < s.partition.shot_count(); ++i) out << (i ? " " : "") << s.partition.starts[i];
  out << "\n# shot_scores=";
  for (std::size_t i = 0; i < s.shot_scores.size(); ++i) out << (i ? " " : "") << fmt(s.shot_scores[i]);
  out << "\n# selected_shots=";
  bool first = true;
  for (std::size_t i = 0; i < s.selected_shots.size(); ++i)
    if (s.selected_shots[i]) {
      out << (first ? "" : " ") << i;
      first = false;
    }
  out << "\nframe,score,selected\n";
  for (std::size_t t = 0; t < s.frame_scores.size(); ++t)
    out << t << ',' << fmt(s.frame_scores[t]) << ',' << static_cast<int>(s.mask[t]) << '\n';
}

}  // namespace sumdca
