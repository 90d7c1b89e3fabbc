#pragma once

// Straightforward loop implementations used as ground truth. None of these
// share code with the library beyond the Matrix container.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "sumdca/attention.hpp"
#include "sumdca/matrix.hpp"
#include "sumdca/partition_map.hpp"
#include "sumdca/random.hpp"

namespace sumdca::oracle {

Matrix naive_matmul(const Matrix& a, const Matrix& b);
Matrix naive_similarity(const Matrix& q, const Matrix& k, SimilarityKind kind, double scale_q);
Matrix naive_column_softmax(const Matrix& a);

struct NaiveAttention {
  Matrix features;
  Matrix weights;
};

NaiveAttention naive_gda(const Matrix& x, const Matrix& wq, const Matrix& wk, const Matrix& wv,
                         SimilarityKind kind, double scale_q, const Matrix* positions);

/// Per-anchor window loop; weights are T x (2R+1) with 0 for dropped slots.
NaiveAttention naive_lca(const Matrix& x, const Matrix& wq, const Matrix& wk, const Matrix& wv,
                         const Matrix& rel_pos, std::size_t radius, LcaVariant variant, WindowPolicy policy);

double naive_bce(std::span<const double> y, std::span<const double> labels, double eps);
double naive_repelling(const Matrix& e);
double naive_reconstruction(const Matrix& x, const Matrix& rec);

struct BruteKnapsack {
  double value = 0.0;
  std::vector<std::uint8_t> selection;
};
/// Exhaustive 2^S enumeration; values are summed in index order.
BruteKnapsack brute_knapsack(std::span<const std::size_t> lengths, std::span<const double> scores,
                             std::size_t budget);

/// Index of the closest point by direct squared distance (lowest index on ties).
std::size_t nearest_point(std::span<const Point2> points, Point2 u);

struct PlantedSequence {
  Matrix features;
  std::vector<std::size_t> starts;
};
/// `blocks` constant segments (length >= min_len) with prototypes in [0,1]^d
/// plus N(0, noise^2) jitter.
PlantedSequence planted_blocks(Rng& rng, std::size_t frames, std::size_t dim, std::size_t blocks,
                               std::size_t min_len, double noise);

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double lo, double hi);

}  // namespace sumdca::oracle
