#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "sumdca/matrix.hpp"
#include "sumdca/tape.hpp"

namespace sumdca {

enum class SimilarityKind { kDot, kCosine, kL2 };

/// How the local window treats frames before the start / past the end.
enum class WindowPolicy {
  kClamp,     ///< replicate the edge frame (default)
  kZeroPad,   ///< substitute an all-zero frame
  kTruncate,  ///< drop out-of-range positions from the softmax
};

/// kLiteral multiplies only the anchor's value by the summed window weights.
/// kContextual aggregates the value projections of all window frames.
enum class LcaVariant { kLiteral, kContextual };

std::string_view to_string(SimilarityKind kind);
std::string_view to_string(WindowPolicy policy);
std::string_view to_string(LcaVariant variant);
SimilarityKind parse_similarity(std::string_view text);
WindowPolicy parse_window_policy(std::string_view text);
LcaVariant parse_lca_variant(std::string_view text);

/// Sinusoidal position table: P(i, 2j) = sin(i / 10000^(2j/d)),
/// P(i, 2j+1) = cos(i / 10000^(2j/d)). `dim` must be even.
Matrix sinusoidal_positions(std::size_t frame_count, std::size_t dim);

/// A(i, j) = s(q_i, k_j) / sqrt(scale_q) for an m x d query block and an
/// n x d key block. The l2 kind uses 2 q.k - |q|^2 - |k|^2.
Matrix pairwise_similarity(const Matrix& queries, const Matrix& keys, SimilarityKind kind,
                           double scale_q);
Var pairwise_similarity(Var queries, Var keys, SimilarityKind kind, double scale_q);

struct GdaWeights {
  Var query;
  Var key;
  Var value;
};

/// Global attention projections (each d x d) and similarity settings.
struct GdaParams {
  Parameter query;
  Parameter key;
  Parameter value;
  SimilarityKind similarity = SimilarityKind::kL2;
  /// Divisor under the square root; 0 means "use the feature dimension".
  double scale_q = 0.0;

  GdaWeights bind(Tape& tape);
  GdaWeights bind_const(Tape& tape) const;
  double effective_scale(std::size_t dim) const { return scale_q > 0.0 ? scale_q : static_cast<double>(dim); }
};

struct LcaWeights {
  Var query;
  Var key;
  Var value;
  Var rel_pos;
};

/// Local attention projections (each d x d), relative position table
/// ((2R+1) x d) and window settings.
struct LcaParams {
  Parameter query;
  Parameter key;
  Parameter value;
  Parameter rel_pos;
  std::size_t radius = 2;
  LcaVariant variant = LcaVariant::kContextual;
  WindowPolicy window = WindowPolicy::kClamp;

  LcaWeights bind(Tape& tape);
  LcaWeights bind_const(Tape& tape) const;
};

struct AttentionOutput {
  Var features;
  /// GDA: T x T column-stochastic map. LCA: T x (2R+1), row h holding the
  /// normalized weights of the window anchored at frame h.
  Matrix weights;
};

/// Plain-matrix result for callers outside a tape.
struct AttentionResult {
  Matrix features;
  Matrix weights;
};

/// x^g_j = sum_i softmax_i(A)(i, j) * (x_i Wv). `positions` (T x d, may be
/// null) is added to the input on the query/key path only.
AttentionOutput gda_forward(Var x, const GdaWeights& w, SimilarityKind kind, double scale_q,
                            const Matrix* positions);
AttentionResult gda_forward(const Matrix& x, const GdaParams& params, const Matrix* positions);

/// Frame index for each of the 2R+1 window slots around `anchor`; -1 marks a
/// slot with no frame (zero-pad and truncate policies).
std::vector<std::ptrdiff_t> window_indices(std::size_t frame_count, std::size_t anchor,
                                           std::size_t radius, WindowPolicy policy);

/// Rows x_{h-R} .. x_{h+R}. Clamp replicates edges, zero-pad inserts zero
/// rows, truncate returns only the in-range rows.
Matrix local_window(const Matrix& x, std::size_t anchor, std::size_t radius,
                    WindowPolicy policy = WindowPolicy::kClamp);

AttentionOutput lca_forward(Var x, const LcaWeights& w, std::size_t radius, LcaVariant variant,
                            WindowPolicy window);
AttentionResult lca_forward(const Matrix& x, const LcaParams& params);

/// X + Xg + Xl.
Var dca_fuse(Var x, Var global, Var local);
Matrix dca_fuse(const Matrix& x, const Matrix& global, const Matrix& local);

}  // namespace sumdca
