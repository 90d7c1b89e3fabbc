#include "sumdca/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sumdca/errors.hpp"

namespace sumdca {

ShotPartition ShotPartition::from_starts(std::vector<std::size_t> starts, std::size_t frame_count) {
  ShotPartition p;
  p.lengths.reserve(starts.size());
  for (std::size_t i = 0; i < starts.size(); ++i) {
    const std::size_t end = i + 1 < starts.size() ? starts[i + 1] : frame_count;
    if (end <= starts[i])
      throw ContractError("shot starts must be strictly increasing and below the frame count");
    p.lengths.push_back(end - starts[i]);
  }
  p.starts = std::move(starts);
  p.validate(frame_count);
  return p;
}

ShotPartition ShotPartition::single(std::size_t frame_count) {
  if (frame_count == 0) throw ContractError("cannot partition an empty video");
  return ShotPartition{{0}, {frame_count}};
}

std::size_t ShotPartition::frame_count() const noexcept {
  std::size_t total = 0;
  for (std::size_t l : lengths) total += l;
  return total;
}

void ShotPartition::validate(std::size_t frame_count) const {
  if (starts.size() != lengths.size())
    throw ContractError("shot partition has " + std::to_string(starts.size()) + " starts but " +
                        std::to_string(lengths.size()) + " lengths");
  if (starts.empty()) throw ContractError("shot partition is empty");
  std::size_t expected = 0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (starts[i] != expected)
      throw ContractError("shot " + std::to_string(i) + " starts at " + std::to_string(starts[i]) +
                          ", expected " + std::to_string(expected));
    if (lengths[i] == 0) throw ContractError("shot " + std::to_string(i) + " has zero length");
    expected += lengths[i];
  }
  if (expected != frame_count)
    throw ContractError("shot partition covers " + std::to_string(expected) + " frames, video has " +
                        std::to_string(frame_count));
}

namespace {

/// Within-segment scatter of every [a, b) from centered prefix sums.
class SegmentCost {
 public:
  explicit SegmentCost(const Matrix& x) : t_(x.rows()), d_(x.cols()), sums_((t_ + 1) * d_, 0.0), norms_(t_ + 1, 0.0) {
    std::vector<double> mean(d_, 0.0);
    for (std::size_t t = 0; t < t_; ++t)
      for (std::size_t j = 0; j < d_; ++j) mean[j] += x(t, j);
    for (double& m : mean) m /= static_cast<double>(t_);
    for (std::size_t t = 0; t < t_; ++t) {
      double sq = 0.0;
      for (std::size_t j = 0; j < d_; ++j) {
        const double v = x(t, j) - mean[j];
        sums_[(t + 1) * d_ + j] = sums_[t * d_ + j] + v;
        sq += v * v;
      }
      norms_[t + 1] = norms_[t] + sq;
    }
  }

  double operator()(std::size_t a, std::size_t b) const {
    double s = 0.0;
    for (std::size_t j = 0; j < d_; ++j) {
      const double v = sums_[b * d_ + j] - sums_[a * d_ + j];
      s += v * v;
    }
    return std::max(0.0, norms_[b] - norms_[a] - s / static_cast<double>(b - a));
  }

 private:
  std::size_t t_, d_;
  std::vector<double> sums_;
  std::vector<double> norms_;
};

constexpr double kScatterFloor = 1e-3;

/// Robust per-frame noise energy: half the median squared distance between
/// consecutive frames. Shot boundaries are a minority of frame pairs, so the
/// median reflects within-shot jitter.
double noise_energy(const Matrix& x) {
  if (x.rows() < 2) return 0.0;
  std::vector<double> diffs(x.rows() - 1);
  for (std::size_t t = 1; t < x.rows(); ++t) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double v = x(t, j) - x(t - 1, j);
      s += v * v;
    }
    diffs[t - 1] = s;
  }
  const auto mid = diffs.begin() + static_cast<std::ptrdiff_t>(diffs.size() / 2);
  std::nth_element(diffs.begin(), mid, diffs.end());
  return 0.5 * *mid;
}

}  // namespace

KtsTable kts_table(const Matrix& features, std::size_t max_shots) {
  const std::size_t n = features.rows();
  if (n == 0) throw ContractError("kts_segment: empty feature sequence");
  if (max_shots == 0) throw ContractError("kts_segment: max_shots must be at least 1");
  if (!features.all_finite()) throw NumericError("kts_segment: non-finite features");
  const std::size_t m_max = std::min(max_shots, n);

  const SegmentCost cost(features);
  std::vector<double> cost_table(n * (n + 1), 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b <= n; ++b) cost_table[a * (n + 1) + b] = cost(a, b);
  auto c = [&](std::size_t a, std::size_t b) { return cost_table[a * (n + 1) + b]; };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  // best[m][t]: minimal scatter of frames [0, t) in m + 1 segments.
  std::vector<std::vector<double>> best(m_max, std::vector<double>(n + 1, kInf));
  std::vector<std::vector<std::size_t>> arg(m_max, std::vector<std::size_t>(n + 1, 0));
  for (std::size_t t = 1; t <= n; ++t) best[0][t] = c(0, t);
  for (std::size_t m = 1; m < m_max; ++m) {
    for (std::size_t t = m + 1; t <= n; ++t) {
      double v = kInf;
      std::size_t at = m;
      for (std::size_t s = m; s < t; ++s) {
        const double cand = best[m - 1][s] + c(s, t);
        if (cand < v) {
          v = cand;
          at = s;
        }
      }
      best[m][t] = v;
      arg[m][t] = at;
    }
  }

  KtsTable table;
  for (std::size_t m = 0; m < m_max; ++m) {
    table.scatter.push_back(best[m][n]);
    std::vector<std::size_t> starts(m + 1, 0);
    std::size_t t = n;
    for (std::size_t k = m; k > 0; --k) {
      t = arg[k][t];
      starts[k] = t;
    }
    table.partitions.push_back(ShotPartition::from_starts(std::move(starts), n));
  }
  return table;
}

ShotPartition kts_segment(const Matrix& features, std::size_t max_shots, const KtsOptions& options) {
  const std::size_t n = features.rows();
  if (n == 0) throw ContractError("kts_segment: empty feature sequence");
  if (max_shots == 0) throw ContractError("kts_segment: max_shots must be at least 1");
  if (max_shots > n) {
    std::vector<std::size_t> starts(n);
    for (std::size_t t = 0; t < n; ++t) starts[t] = t;
    return ShotPartition::from_starts(std::move(starts), n);
  }
  const KtsTable table = kts_table(features, max_shots);
  const double total = table.scatter[0];
  // Scatter indistinguishable from rounding noise: the sequence is constant.
  double energy = 0.0;
  for (double v : features.data()) energy += v * v;
  if (total <= 1e-12 * std::max(1.0, energy)) return ShotPartition::single(n);

  const double t = static_cast<double>(n);
  const double g = std::max(options.penalty_scale * noise_energy(features), kScatterFloor * total / t);
  std::size_t chosen = 0;
  double chosen_value = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < table.scatter.size(); ++k) {
    const double m = static_cast<double>(k + 1);
    const double value = table.scatter[k] + g * m * (std::log(t / m) + 1.0);
    if (value < chosen_value) {
      chosen_value = value;
      chosen = k;
    }
  }
  return table.partitions[chosen];
}

std::vector<double> shot_scores(std::span<const double> frame_scores, const ShotPartition& part) {
  part.validate(frame_scores.size());
  std::vector<double> out(part.shot_count(), 0.0);
  for (std::size_t i = 0; i < part.shot_count(); ++i) {
    double s = 0.0;
    for (std::size_t t = part.starts[i]; t < part.starts[i] + part.lengths[i]; ++t) s += frame_scores[t];
    out[i] = s / static_cast<double>(part.lengths[i]);
  }
  return out;
}

std::size_t default_max_shots(std::size_t frame_count) {
  return std::max<std::size_t>(1, std::min(frame_count, frame_count / 4 + 1));
}

}  // namespace sumdca
