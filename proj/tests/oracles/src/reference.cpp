#include "sumdca_oracles/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace sumdca::oracle {

Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("naive_matmul: shape mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

Matrix naive_similarity(const Matrix& q, const Matrix& k, SimilarityKind kind, double scale_q) {
  Matrix out(q.rows(), k.rows());
  const double inv = 1.0 / std::sqrt(scale_q);
  for (std::size_t i = 0; i < q.rows(); ++i)
    for (std::size_t j = 0; j < k.rows(); ++j) {
      double dot = 0.0, nq = 0.0, nk = 0.0, dist = 0.0;
      for (std::size_t c = 0; c < q.cols(); ++c) {
        dot += q(i, c) * k(j, c);
        nq += q(i, c) * q(i, c);
        nk += k(j, c) * k(j, c);
        const double diff = q(i, c) - k(j, c);
        dist += diff * diff;
      }
      double s = 0.0;
      switch (kind) {
        case SimilarityKind::kDot: s = dot; break;
        case SimilarityKind::kCosine: s = dot / (std::sqrt(nq) * std::sqrt(nk)); break;
        case SimilarityKind::kL2: s = -dist; break;
      }
      out(i, j) = s * inv;
    }
  return out;
}

Matrix naive_column_softmax(const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) {
    double mx = a(0, j);
    for (std::size_t i = 1; i < a.rows(); ++i) mx = std::max(mx, a(i, j));
    double z = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) z += std::exp(a(i, j) - mx);
    for (std::size_t i = 0; i < a.rows(); ++i) out(i, j) = std::exp(a(i, j) - mx) / z;
  }
  return out;
}

NaiveAttention naive_gda(const Matrix& x, const Matrix& wq, const Matrix& wk, const Matrix& wv,
                         SimilarityKind kind, double scale_q, const Matrix* positions) {
  Matrix xp = x;
  if (positions)
    for (std::size_t i = 0; i < x.rows(); ++i)
      for (std::size_t c = 0; c < x.cols(); ++c) xp(i, c) += (*positions)(i, c);
  const Matrix q = naive_matmul(xp, wq);
  const Matrix k = naive_matmul(xp, wk);
  const Matrix v = naive_matmul(x, wv);
  const Matrix w = naive_column_softmax(naive_similarity(q, k, kind, scale_q));
  Matrix out(x.rows(), wv.cols());
  for (std::size_t j = 0; j < x.rows(); ++j)
    for (std::size_t c = 0; c < wv.cols(); ++c) {
      double s = 0.0;
      for (std::size_t i = 0; i < x.rows(); ++i) s += w(i, j) * v(i, c);
      out(j, c) = s;
    }
  return {out, w};
}

NaiveAttention naive_lca(const Matrix& x, const Matrix& wq, const Matrix& wk, const Matrix& wv,
                         const Matrix& rel_pos, std::size_t radius, LcaVariant variant, WindowPolicy policy) {
  const std::size_t t = x.rows(), d = x.cols(), slots = 2 * radius + 1;
  Matrix out(t, wv.cols());
  Matrix weights(t, slots);
  auto project = [&](const std::vector<double>& row, const Matrix& w) {
    std::vector<double> r(w.cols(), 0.0);
    for (std::size_t c = 0; c < w.cols(); ++c)
      for (std::size_t k = 0; k < d; ++k) r[c] += row[k] * w(k, c);
    return r;
  };
  for (std::size_t h = 0; h < t; ++h) {
    std::vector<std::vector<double>> window;
    std::vector<std::size_t> slot_of;
    for (std::size_t r = 0; r < slots; ++r) {
      const long idx = static_cast<long>(h) - static_cast<long>(radius) + static_cast<long>(r);
      const bool inside = idx >= 0 && idx < static_cast<long>(t);
      if (!inside && policy == WindowPolicy::kTruncate) continue;
      std::vector<double> row(d, 0.0);
      if (inside) {
        for (std::size_t c = 0; c < d; ++c) row[c] = x(static_cast<std::size_t>(idx), c);
      } else if (policy == WindowPolicy::kClamp) {
        const std::size_t e = idx < 0 ? 0 : t - 1;
        for (std::size_t c = 0; c < d; ++c) row[c] = x(e, c);
      }
      window.push_back(row);
      slot_of.push_back(r);
    }
    std::vector<double> anchor(d);
    for (std::size_t c = 0; c < d; ++c) anchor[c] = x(h, c);
    const std::vector<double> k = project(anchor, wk);
    std::vector<double> score(window.size());
    for (std::size_t w = 0; w < window.size(); ++w) {
      const std::vector<double> q = project(window[w], wq);
      const std::size_t offset = slot_of[w] > radius ? slot_of[w] - radius : radius - slot_of[w];
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += q[c] * (k[c] + rel_pos(offset, c));
      score[w] = s / std::sqrt(static_cast<double>(d));
    }
    const double mx = *std::max_element(score.begin(), score.end());
    double z = 0.0;
    for (double s : score) z += std::exp(s - mx);
    std::vector<double> b(window.size());
    for (std::size_t w = 0; w < window.size(); ++w) {
      b[w] = std::exp(score[w] - mx) / z;
      weights(h, slot_of[w]) = b[w];
    }
    if (variant == LcaVariant::kLiteral) {
      double total = 0.0;
      for (double v : b) total += v;
      const std::vector<double> v = project(anchor, wv);
      for (std::size_t c = 0; c < v.size(); ++c) out(h, c) = total * v[c];
    } else {
      for (std::size_t w = 0; w < window.size(); ++w) {
        const std::vector<double> v = project(window[w], wv);
        for (std::size_t c = 0; c < v.size(); ++c) out(h, c) += b[w] * v[c];
      }
    }
  }
  return {out, weights};
}

double naive_bce(std::span<const double> y, std::span<const double> labels, double eps) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double p = std::min(std::max(y[i], eps), 1.0 - eps);
    s += labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p);
  }
  return -s / static_cast<double>(y.size());
}

double naive_repelling(const Matrix& e) {
  const std::size_t t = e.rows();
  double s = 0.0;
  for (std::size_t i = 0; i < t; ++i)
    for (std::size_t j = 0; j < t; ++j) {
      if (i == j) continue;
      double dot = 0.0, ni = 0.0, nj = 0.0;
      for (std::size_t c = 0; c < e.cols(); ++c) {
        dot += e(i, c) * e(j, c);
        ni += e(i, c) * e(i, c);
        nj += e(j, c) * e(j, c);
      }
      s += dot / std::sqrt(ni * nj);
    }
  return s / static_cast<double>(t * (t - 1));
}

double naive_reconstruction(const Matrix& x, const Matrix& rec) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double r = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) r += (x(i, c) - rec(i, c)) * (x(i, c) - rec(i, c));
    s += std::sqrt(r);
  }
  return s / static_cast<double>(x.rows());
}

BruteKnapsack brute_knapsack(std::span<const std::size_t> lengths, std::span<const double> scores,
                             std::size_t budget) {
  const std::size_t n = lengths.size();
  BruteKnapsack best;
  best.selection.assign(n, 0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    std::size_t used = 0;
    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::uint64_t{1} << i)) {
        used += lengths[i];
        value += scores[i];
      }
    if (used > budget) continue;
    if (value > best.value) {
      best.value = value;
      for (std::size_t i = 0; i < n; ++i) best.selection[i] = (mask >> i) & 1u;
    }
  }
  return best;
}

std::size_t nearest_point(std::span<const Point2> points, Point2 u) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double dx = u.x - points[i].x, dy = u.y - points[i].y;
    const double d = dx * dx + dy * dy;
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

PlantedSequence planted_blocks(Rng& rng, std::size_t frames, std::size_t dim, std::size_t blocks,
                               std::size_t min_len, double noise) {
  if (blocks * min_len > frames) throw std::invalid_argument("planted_blocks: blocks do not fit");
  // Distribute the slack beyond the minimum lengths at random.
  std::vector<std::size_t> lengths(blocks, min_len);
  for (std::size_t extra = frames - blocks * min_len; extra > 0; --extra) ++lengths[rng.index(blocks)];
  PlantedSequence out;
  out.features = Matrix(frames, dim);
  std::size_t t = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    out.starts.push_back(t);
    std::vector<double> proto(dim);
    for (double& p : proto) p = rng.uniform();
    for (std::size_t k = 0; k < lengths[b]; ++k, ++t)
      for (std::size_t c = 0; c < dim; ++c) out.features(t, c) = proto[c] + (noise > 0.0 ? noise * rng.normal() : 0.0);
  }
  return out;
}

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double lo, double hi) {
  Matrix m(rows, cols);
  for (double& v : m.data()) v = rng.uniform(lo, hi);
  return m;
}

}  // namespace sumdca::oracle
