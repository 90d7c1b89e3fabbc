#pragma once

#include <cstddef>
#include <span>

#include "sumdca/matrix.hpp"
#include "sumdca/tape.hpp"

// Differentiable operations recorded on a Tape. Every op validates shapes and
// throws ShapeError naming the offending shapes.
namespace sumdca::ops {

Var matmul(Var a, Var b);
Var transpose(Var a);

Var add(Var a, Var b);
Var subtract(Var a, Var b);
Var hadamard(Var a, Var b);
Var scale(Var a, double factor);
/// a (m x n) plus a 1 x n row repeated over every row.
Var add_row_broadcast(Var a, Var row);
/// a (m x n) plus an m x 1 column repeated over every column.
Var add_col_broadcast(Var a, Var column);

Var relu(Var a);
Var sigmoid(Var a);

/// Softmax over the first index: every column sums to one. Stabilized by
/// subtracting the per-column maximum. Throws NumericError on NaN/Inf input.
Var column_softmax(Var a);
/// Column softmax restricted to entries whose mask value is nonzero; masked
/// entries come out as exactly zero. Every column must keep at least one entry.
Var column_softmax_masked(Var a, const Matrix& mask);

/// m x 1 column of squared row norms.
Var row_norms_squared(Var a);
/// m x 1 column of Euclidean row norms. The derivative at a zero row is taken as 0.
Var row_norms(Var a);
/// Each row divided by its Euclidean norm. Throws NumericError on a zero row.
Var row_normalize(Var a);

/// 1x1 sum of all entries.
Var sum(Var a);
/// 1x1 mean of all entries.
Var mean(Var a);
/// 1 x n column sums.
Var column_sums(Var a);

/// Rows of `a` picked by index; a negative index yields a zero row.
Var gather_rows(Var a, std::span<const std::ptrdiff_t> indices);
/// m x 1 column of row-wise inner products of equally shaped a and b.
Var rowwise_dot(Var a, Var b);
/// Row i of `a` multiplied by column(i, 0).
Var scale_rows(Var a, Var column);
/// Horizontal concatenation of blocks with equal row counts.
Var concat_cols(std::span<const Var> blocks);

/// Mean binary cross-entropy between probabilities `y` (any shape with
/// targets.size() entries) and 0/1 targets. Probabilities are clipped to
/// [eps, 1 - eps]; the gradient is zero where clipping is active.
Var binary_cross_entropy(Var y, std::span<const double> targets, double eps = 1e-7);

}  // namespace sumdca::ops
