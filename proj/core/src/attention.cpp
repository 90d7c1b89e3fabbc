#include "sumdca/attention.hpp"

#include <cmath>
#include <string>

#include "sumdca/errors.hpp"
#include "sumdca/ops.hpp"

namespace sumdca {

std::string_view to_string(SimilarityKind kind) {
  switch (kind) {
    case SimilarityKind::kDot: return "dot";
    case SimilarityKind::kCosine: return "cosine";
    case SimilarityKind::kL2: return "l2";
  }
  return "?";
}

std::string_view to_string(WindowPolicy policy) {
  switch (policy) {
    case WindowPolicy::kClamp: return "clamp";
    case WindowPolicy::kZeroPad: return "zero";
    case WindowPolicy::kTruncate: return "truncate";
  }
  return "?";
}

std::string_view to_string(LcaVariant variant) {
  return variant == LcaVariant::kLiteral ? "literal" : "contextual";
}

SimilarityKind parse_similarity(std::string_view text) {
  if (text == "dot") return SimilarityKind::kDot;
  if (text == "cosine") return SimilarityKind::kCosine;
  if (text == "l2") return SimilarityKind::kL2;
  throw ContractError("unknown similarity kind '" + std::string(text) + "' (dot, cosine, l2)");
}

WindowPolicy parse_window_policy(std::string_view text) {
  if (text == "clamp") return WindowPolicy::kClamp;
  if (text == "zero") return WindowPolicy::kZeroPad;
  if (text == "truncate") return WindowPolicy::kTruncate;
  throw ContractError("unknown window policy '" + std::string(text) + "' (clamp, zero, truncate)");
}

LcaVariant parse_lca_variant(std::string_view text) {
  if (text == "literal") return LcaVariant::kLiteral;
  if (text == "contextual") return LcaVariant::kContextual;
  throw ContractError("unknown LCA variant '" + std::string(text) + "' (literal, contextual)");
}

Matrix sinusoidal_positions(std::size_t frame_count, std::size_t dim) {
  if (dim % 2 != 0)
    throw ContractError("sinusoidal_positions: dimension must be even, got " + std::to_string(dim));
  Matrix p(frame_count, dim);
  for (std::size_t j = 0; j < dim / 2; ++j) {
    const double freq = std::pow(10000.0, static_cast<double>(2 * j) / static_cast<double>(dim));
    for (std::size_t i = 0; i < frame_count; ++i) {
      const double angle = static_cast<double>(i) / freq;
      p(i, 2 * j) = std::sin(angle);
      p(i, 2 * j + 1) = std::cos(angle);
    }
  }
  return p;
}

Matrix pairwise_similarity(const Matrix& queries, const Matrix& keys, SimilarityKind kind,
                           double scale_q) {
  if (queries.cols() != keys.cols())
    throw ShapeError("pairwise_similarity: query " + shape_string(queries) + " vs key " +
                     shape_string(keys));
  if (!(scale_q > 0.0)) throw ContractError("pairwise_similarity: scale_q must be positive");
  const double inv = 1.0 / std::sqrt(scale_q);

  Matrix q = queries;
  Matrix k = keys;
  if (kind == SimilarityKind::kCosine) {
    for (Matrix* m : {&q, &k}) {
      for (std::size_t i = 0; i < m->rows(); ++i) {
        double n = 0.0;
        for (double v : m->row_span(i)) n += v * v;
        n = std::sqrt(n);
        if (!(n > 0.0)) throw NumericError("pairwise_similarity: cosine of a zero vector");
        for (double& v : m->row_span(i)) v /= n;
      }
    }
  }
  Matrix a = multiply(q, k.transposed());
  if (kind == SimilarityKind::kL2) {
    std::vector<double> qn(q.rows()), kn(k.rows());
    for (std::size_t i = 0; i < q.rows(); ++i)
      for (double v : q.row_span(i)) qn[i] += v * v;
    for (std::size_t j = 0; j < k.rows(); ++j)
      for (double v : k.row_span(j)) kn[j] += v * v;
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) = 2.0 * a(i, j) - qn[i] - kn[j];
  }
  a *= inv;
  return a;
}

Var pairwise_similarity(Var queries, Var keys, SimilarityKind kind, double scale_q) {
  if (queries.cols() != keys.cols())
    throw ShapeError("pairwise_similarity: query " + shape_string(queries.value()) + " vs key " +
                     shape_string(keys.value()));
  if (!(scale_q > 0.0)) throw ContractError("pairwise_similarity: scale_q must be positive");
  const double inv = 1.0 / std::sqrt(scale_q);
  switch (kind) {
    case SimilarityKind::kDot:
      return ops::scale(ops::matmul(queries, ops::transpose(keys)), inv);
    case SimilarityKind::kCosine:
      return ops::scale(
          ops::matmul(ops::row_normalize(queries), ops::transpose(ops::row_normalize(keys))), inv);
    case SimilarityKind::kL2: {
      Var cross = ops::scale(ops::matmul(queries, ops::transpose(keys)), 2.0);
      Var key_norms = ops::scale(ops::transpose(ops::row_norms_squared(keys)), -1.0);
      Var query_norms = ops::scale(ops::row_norms_squared(queries), -1.0);
      Var a = ops::add_col_broadcast(ops::add_row_broadcast(cross, key_norms), query_norms);
      return ops::scale(a, inv);
    }
  }
  throw ContractError("pairwise_similarity: unknown kind");
}

GdaWeights GdaParams::bind(Tape& tape) {
  return {tape.parameter(query), tape.parameter(key), tape.parameter(value)};
}

GdaWeights GdaParams::bind_const(Tape& tape) const {
  return {tape.constant_ref(query.value), tape.constant_ref(key.value), tape.constant_ref(value.value)};
}

LcaWeights LcaParams::bind(Tape& tape) {
  return {tape.parameter(query), tape.parameter(key), tape.parameter(value), tape.parameter(rel_pos)};
}

LcaWeights LcaParams::bind_const(Tape& tape) const {
  return {tape.constant_ref(query.value), tape.constant_ref(key.value),
          tape.constant_ref(value.value), tape.constant_ref(rel_pos.value)};
}

AttentionOutput gda_forward(Var x, const GdaWeights& w, SimilarityKind kind, double scale_q,
                            const Matrix* positions) {
  Var qk_input = x;
  if (positions != nullptr) {
    if (!positions->same_shape(x.value()))
      throw ShapeError("gda_forward: positions " + shape_string(*positions) + " vs features " +
                       shape_string(x.value()));
    qk_input = ops::add(x, x.tape().constant(*positions));
  }
  Var q = ops::matmul(qk_input, w.query);
  Var k = ops::matmul(qk_input, w.key);
  Var v = ops::matmul(x, w.value);
  Var weights = ops::column_softmax(pairwise_similarity(q, k, kind, scale_q));
  Var out = ops::matmul(ops::transpose(weights), v);
  return {out, weights.value()};
}

AttentionResult gda_forward(const Matrix& x, const GdaParams& params, const Matrix* positions) {
  Tape tape;
  Var xv = tape.constant_ref(x);
  AttentionOutput out = gda_forward(xv, params.bind_const(tape), params.similarity,
                                    params.effective_scale(x.cols()), positions);
  return {out.features.value(), std::move(out.weights)};
}

std::vector<std::ptrdiff_t> window_indices(std::size_t frame_count, std::size_t anchor,
                                           std::size_t radius, WindowPolicy policy) {
  if (anchor >= frame_count)
    throw ContractError("window anchor " + std::to_string(anchor) + " out of range for " +
                        std::to_string(frame_count) + " frames");
  std::vector<std::ptrdiff_t> idx(2 * radius + 1);
  const auto t = static_cast<std::ptrdiff_t>(frame_count);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const std::ptrdiff_t pos =
        static_cast<std::ptrdiff_t>(anchor) + static_cast<std::ptrdiff_t>(r) -
        static_cast<std::ptrdiff_t>(radius);
    if (pos >= 0 && pos < t) {
      idx[r] = pos;
    } else if (policy == WindowPolicy::kClamp) {
      idx[r] = pos < 0 ? 0 : t - 1;
    } else {
      idx[r] = -1;
    }
  }
  return idx;
}

Matrix local_window(const Matrix& x, std::size_t anchor, std::size_t radius, WindowPolicy policy) {
  const auto idx = window_indices(x.rows(), anchor, radius, policy);
  std::vector<std::ptrdiff_t> kept;
  for (std::ptrdiff_t i : idx)
    if (i >= 0 || policy == WindowPolicy::kZeroPad) kept.push_back(i);
  Matrix w(kept.size(), x.cols());
  for (std::size_t r = 0; r < kept.size(); ++r) {
    if (kept[r] < 0) continue;
    const auto src = x.row_span(static_cast<std::size_t>(kept[r]));
    std::copy(src.begin(), src.end(), w.row_span(r).begin());
  }
  return w;
}

AttentionOutput lca_forward(Var x, const LcaWeights& w, std::size_t radius, LcaVariant variant,
                            WindowPolicy window) {
  if (radius == 0) throw ContractError("lca_forward: neighbor radius must be >= 1");
  const std::size_t frames = x.rows();
  const std::size_t dim = x.cols();
  const std::size_t slots = 2 * radius + 1;
  if (w.rel_pos.rows() != slots || w.rel_pos.cols() != dim)
    throw ShapeError("lca_forward: relative positions " + shape_string(w.rel_pos.value()) +
                     " but window needs " + std::to_string(slots) + "x" + std::to_string(dim));
  if (frames == 0) throw ContractError("lca_forward: empty sequence");

  // slot_index[r][h]: frame sitting in slot r of the window anchored at h.
  std::vector<std::vector<std::ptrdiff_t>> slot_index(slots, std::vector<std::ptrdiff_t>(frames));
  Matrix mask(slots, frames, 1.0);
  for (std::size_t h = 0; h < frames; ++h) {
    const auto idx = window_indices(frames, h, radius, window);
    for (std::size_t r = 0; r < slots; ++r) {
      slot_index[r][h] = idx[r];
      if (idx[r] < 0 && window == WindowPolicy::kTruncate) mask(r, h) = 0.0;
    }
  }

  Var q = ops::matmul(x, w.query);
  Var k = ops::matmul(x, w.key);
  Var v = ops::matmul(x, w.value);

  // Only the anchor column of each window matrix feeds the output, so the
  // scores needed are B(r, R) = q_{h-R+r} . (k_h + a_{|r-R|}) / sqrt(d).
  std::vector<Var> columns;
  columns.reserve(slots);
  for (std::size_t r = 0; r < slots; ++r) {
    const std::size_t offset = r > radius ? r - radius : radius - r;
    std::vector<std::ptrdiff_t> rel_rows(frames, static_cast<std::ptrdiff_t>(offset));
    Var keys = ops::add(k, ops::gather_rows(w.rel_pos, rel_rows));
    columns.push_back(ops::rowwise_dot(ops::gather_rows(q, slot_index[r]), keys));
  }
  Var scores = ops::scale(ops::concat_cols(columns), 1.0 / std::sqrt(static_cast<double>(dim)));
  Var scores_t = ops::transpose(scores);  // slots x frames, one window per column
  Var weights = window == WindowPolicy::kTruncate ? ops::column_softmax_masked(scores_t, mask)
                                                  : ops::column_softmax(scores_t);

  Var out;
  if (variant == LcaVariant::kLiteral) {
    out = ops::scale_rows(v, ops::transpose(ops::column_sums(weights)));
  } else {
    for (std::size_t r = 0; r < slots; ++r) {
      const std::ptrdiff_t row = static_cast<std::ptrdiff_t>(r);
      Var slot_weight = ops::transpose(ops::gather_rows(weights, std::span(&row, 1)));
      Var term = ops::scale_rows(ops::gather_rows(v, slot_index[r]), slot_weight);
      out = out.valid() ? ops::add(out, term) : term;
    }
  }
  return {out, weights.value().transposed()};
}

AttentionResult lca_forward(const Matrix& x, const LcaParams& params) {
  Tape tape;
  Var xv = tape.constant_ref(x);
  AttentionOutput out =
      lca_forward(xv, params.bind_const(tape), params.radius, params.variant, params.window);
  return {out.features.value(), std::move(out.weights)};
}

Var dca_fuse(Var x, Var global, Var local) { return ops::add(ops::add(x, global), local); }

Matrix dca_fuse(const Matrix& x, const Matrix& global, const Matrix& local) {
  if (!x.same_shape(global) || !x.same_shape(local))
    throw ShapeError("dca_fuse: shapes " + shape_string(x) + ", " + shape_string(global) + ", " +
                     shape_string(local));
  Matrix out = x;
  out += global;
  out += local;
  return out;
}

}  // namespace sumdca
