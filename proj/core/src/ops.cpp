#include "sumdca/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sumdca/errors.hpp"

namespace sumdca::ops {
namespace {

void require_same_tape(Var a, Var b, const char* op) {
  if (&a.tape() != &b.tape()) throw ContractError(std::string(op) + ": operands on different tapes");
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_string(a) + " vs " +
                     shape_string(b));
}

// out = a^T * b without materializing the transpose.
Matrix multiply_at_b(const Matrix& a, const Matrix& b) {
  Matrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k) {
    const double* b_row = b.row_span(k).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      double* out_row = out.row_span(i).data();
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aki * b_row[j];
    }
  }
  return out;
}

// out = a * b^T.
Matrix multiply_a_bt(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto a_row = a.row_span(i);
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const auto b_row = b.row_span(j);
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a_row[k] * b_row[k];
      out(i, j) = acc;
    }
  }
  return out;
}

template <typename F, typename D>
Var unary_map(Var a, const char* name, F f, D dfdx_from_output) {
  const Matrix& x = a.value();
  Matrix y(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) y.data()[i] = f(x.data()[i]);
  const std::size_t ia = a.id();
  std::size_t self = a.tape().size();
  return a.tape().record(
      std::move(y), {ia},
      [ia, self, dfdx_from_output](Tape& t, const Matrix& g) {
        const Matrix& x_in = t.value(ia);
        const Matrix& y_out = t.value(self);
        Matrix& ga = t.grad_of(ia);
        for (std::size_t i = 0; i < g.size(); ++i)
          ga.data()[i] += g.data()[i] * dfdx_from_output(x_in.data()[i], y_out.data()[i]);
      },
      name);
}

}  // namespace

Var matmul(Var a, Var b) {
  require_same_tape(a, b, "matmul");
  Matrix out = multiply(a.value(), b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      std::move(out), {ia, ib},
      [ia, ib](Tape& t, const Matrix& g) {
        if (t.requires_grad(ia)) t.grad_of(ia) += multiply_a_bt(g, t.value(ib));
        if (t.requires_grad(ib)) t.grad_of(ib) += multiply_at_b(t.value(ia), g);
      },
      "matmul");
}

Var transpose(Var a) {
  const std::size_t ia = a.id();
  return a.tape().record(
      a.value().transposed(), {ia},
      [ia](Tape& t, const Matrix& g) { t.grad_of(ia) += g.transposed(); }, "transpose");
}

Var add(Var a, Var b) {
  require_same_tape(a, b, "add");
  require_same_shape(a.value(), b.value(), "add");
  Matrix out = a.value();
  out += b.value();
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      std::move(out), {ia, ib},
      [ia, ib](Tape& t, const Matrix& g) {
        if (t.requires_grad(ia)) t.grad_of(ia) += g;
        if (t.requires_grad(ib)) t.grad_of(ib) += g;
      },
      "add");
}

Var subtract(Var a, Var b) {
  require_same_tape(a, b, "subtract");
  require_same_shape(a.value(), b.value(), "subtract");
  Matrix out = a.value();
  out -= b.value();
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      std::move(out), {ia, ib},
      [ia, ib](Tape& t, const Matrix& g) {
        if (t.requires_grad(ia)) t.grad_of(ia) += g;
        if (t.requires_grad(ib)) t.grad_of(ib) -= g;
      },
      "subtract");
}

Var hadamard(Var a, Var b) {
  require_same_tape(a, b, "hadamard");
  require_same_shape(a.value(), b.value(), "hadamard");
  Matrix out = a.value();
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] *= b.value().data()[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      std::move(out), {ia, ib},
      [ia, ib](Tape& t, const Matrix& g) {
        const Matrix& av = t.value(ia);
        const Matrix& bv = t.value(ib);
        if (t.requires_grad(ia)) {
          Matrix& ga = t.grad_of(ia);
          for (std::size_t i = 0; i < g.size(); ++i) ga.data()[i] += g.data()[i] * bv.data()[i];
        }
        if (t.requires_grad(ib)) {
          Matrix& gb = t.grad_of(ib);
          for (std::size_t i = 0; i < g.size(); ++i) gb.data()[i] += g.data()[i] * av.data()[i];
        }
      },
      "hadamard");
}

Var scale(Var a, double factor) {
  Matrix out = a.value();
  out *= factor;
  const std::size_t ia = a.id();
  return a.tape().record(
      std::move(out), {ia},
      [ia, factor](Tape& t, const Matrix& g) {
        Matrix& ga = t.grad_of(ia);
        for (std::size_t i = 0; i < g.size(); ++i) ga.data()[i] += factor * g.data()[i];
      },
      "scale");
}

Var add_row_broadcast(Var a, Var row) {
  require_same_tape(a, row, "add_row_broadcast");
  const Matrix& av = a.value();
  const Matrix& rv = row.value();
  if (rv.rows() != 1 || rv.cols() != av.cols())
    throw ShapeError("add_row_broadcast: cannot broadcast " + shape_string(rv) + " over " +
                     shape_string(av));
  Matrix out = av;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += rv(0, j);
  const std::size_t ia = a.id(), ir = row.id();
  return a.tape().record(
      std::move(out), {ia, ir},
      [ia, ir](Tape& t, const Matrix& g) {
        if (t.requires_grad(ia)) t.grad_of(ia) += g;
        if (t.requires_grad(ir)) {
          Matrix& gr = t.grad_of(ir);
          for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) gr(0, j) += g(i, j);
        }
      },
      "add_row_broadcast");
}

Var add_col_broadcast(Var a, Var column) {
  require_same_tape(a, column, "add_col_broadcast");
  const Matrix& av = a.value();
  const Matrix& cv = column.value();
  if (cv.cols() != 1 || cv.rows() != av.rows())
    throw ShapeError("add_col_broadcast: cannot broadcast " + shape_string(cv) + " over " +
                     shape_string(av));
  Matrix out = av;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) += cv(i, 0);
  const std::size_t ia = a.id(), ic = column.id();
  return a.tape().record(
      std::move(out), {ia, ic},
      [ia, ic](Tape& t, const Matrix& g) {
        if (t.requires_grad(ia)) t.grad_of(ia) += g;
        if (t.requires_grad(ic)) {
          Matrix& gc = t.grad_of(ic);
          for (std::size_t i = 0; i < g.rows(); ++i)
            for (std::size_t j = 0; j < g.cols(); ++j) gc(i, 0) += g(i, j);
        }
      },
      "add_col_broadcast");
}

Var relu(Var a) {
  return unary_map(
      a, "relu", [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var sigmoid(Var a) {
  return unary_map(
      a, "sigmoid",
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

namespace {

Var softmax_impl(Var a, const Matrix* mask, const char* name) {
  const Matrix& x = a.value();
  if (!x.all_finite()) throw NumericError(std::string(name) + ": non-finite input");
  if (mask != nullptr) require_same_shape(x, *mask, name);
  Matrix s(x.rows(), x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    double mx = -HUGE_VAL;
    for (std::size_t i = 0; i < x.rows(); ++i)
      if (mask == nullptr || (*mask)(i, j) != 0.0) mx = std::max(mx, x(i, j));
    if (mx == -HUGE_VAL)
      throw ContractError(std::string(name) + ": column " + std::to_string(j) +
                          " has no unmasked entry");
    double total = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      if (mask != nullptr && (*mask)(i, j) == 0.0) continue;
      s(i, j) = std::exp(x(i, j) - mx);
      total += s(i, j);
    }
    for (std::size_t i = 0; i < x.rows(); ++i) s(i, j) /= total;
  }
  const std::size_t ia = a.id();
  const std::size_t self = a.tape().size();
  return a.tape().record(
      std::move(s), {ia},
      [ia, self](Tape& t, const Matrix& g) {
        const Matrix& sv = t.value(self);
        Matrix& ga = t.grad_of(ia);
        for (std::size_t j = 0; j < sv.cols(); ++j) {
          double dot = 0.0;
          for (std::size_t i = 0; i < sv.rows(); ++i) dot += sv(i, j) * g(i, j);
          for (std::size_t i = 0; i < sv.rows(); ++i) ga(i, j) += sv(i, j) * (g(i, j) - dot);
        }
      },
      name);
}

}  // namespace

Var column_softmax(Var a) { return softmax_impl(a, nullptr, "column_softmax"); }

Var column_softmax_masked(Var a, const Matrix& mask) {
  return softmax_impl(a, &mask, "column_softmax_masked");
}

Var row_norms_squared(Var a) {
  const Matrix& x = a.value();
  Matrix out(x.rows(), 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double acc = 0.0;
    for (double v : x.row_span(i)) acc += v * v;
    out(i, 0) = acc;
  }
  const std::size_t ia = a.id();
  return a.tape().record(
      std::move(out), {ia},
      [ia](Tape& t, const Matrix& g) {
        const Matrix& xv = t.value(ia);
        Matrix& ga = t.grad_of(ia);
        for (std::size_t i = 0; i < xv.rows(); ++i)
          for (std::size_t j = 0; j < xv.cols(); ++j) ga(i, j) += 2.0 * xv(i, j) * g(i, 0);
      },
      "row_norms_squared");
}

Var row_norms(Var a) {
  const Matrix& x = a.value();
  Matrix out(x.rows(), 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double acc = 0.0;
    for (double v : x.row_span(i)) acc += v * v;
    out(i, 0) = std::sqrt(acc);
  }
  const std::size_t ia = a.id();
  const std::size_t self = a.tape().size();
  return a.tape().record(
      std::move(out), {ia},
      [ia, self](Tape& t, const Matrix& g) {
        const Matrix& xv = t.value(ia);
        const Matrix& nv = t.value(self);
        Matrix& ga = t.grad_of(ia);
        for (std::size_t i = 0; i < xv.rows(); ++i) {
          if (nv(i, 0) == 0.0) continue;
          const double k = g(i, 0) / nv(i, 0);
          for (std::size_t j = 0; j < xv.cols(); ++j) ga(i, j) += k * xv(i, j);
        }
      },
      "row_norms");
}

Var row_normalize(Var a) {
  const Matrix& x = a.value();
  Matrix out(x.rows(), x.cols());
  Matrix norms(x.rows(), 1);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    double acc = 0.0;
    for (double v : x.row_span(i)) acc += v * v;
    const double n = std::sqrt(acc);
    if (!(n > 0.0) || !std::isfinite(n))
      throw NumericError("row_normalize: row " + std::to_string(i) + " has zero or non-finite norm");
    norms(i, 0) = n;
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = x(i, j) / n;
  }
  const std::size_t ia = a.id();
  const std::size_t self = a.tape().size();
  return a.tape().record(
      std::move(out), {ia},
      [ia, self, norms = std::move(norms)](Tape& t, const Matrix& g) {
        const Matrix& y = t.value(self);
        Matrix& ga = t.grad_of(ia);
        for (std::size_t i = 0; i < y.rows(); ++i) {
          double yg = 0.0;
          for (std::size_t j = 0; j < y.cols(); ++j) yg += y(i, j) * g(i, j);
          const double inv = 1.0 / norms(i, 0);
          for (std::size_t j = 0; j < y.cols(); ++j) ga(i, j) += (g(i, j) - y(i, j) * yg) * inv;
        }
      },
      "row_normalize");
}

Var sum(Var a) {
  double acc = 0.0;
  for (double v : a.value().data()) acc += v;
  const std::size_t ia = a.id();
  return a.tape().record(
      Matrix(1, 1, acc), {ia},
      [ia](Tape& t, const Matrix& g) {
        Matrix& ga = t.grad_of(ia);
        for (double& v : ga.data()) v += g(0, 0);
      },
      "sum");
}

Var mean(Var a) {
  const std::size_t n = a.value().size();
  if (n == 0) throw ContractError("mean of an empty matrix");
  return scale(sum(a), 1.0 / static_cast<double>(n));
}

Var column_sums(Var a) {
  const Matrix& x = a.value();
  Matrix out(1, x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(0, j) += x(i, j);
  const std::size_t ia = a.id();
  return a.tape().record(
      std::move(out), {ia},
      [ia](Tape& t, const Matrix& g) {
        Matrix& ga = t.grad_of(ia);
        for (std::size_t i = 0; i < ga.rows(); ++i)
          for (std::size_t j = 0; j < ga.cols(); ++j) ga(i, j) += g(0, j);
      },
      "column_sums");
}

Var gather_rows(Var a, std::span<const std::ptrdiff_t> indices) {
  const Matrix& x = a.value();
  Matrix out(indices.size(), x.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const std::ptrdiff_t src = indices[r];
    if (src < 0) continue;
    if (static_cast<std::size_t>(src) >= x.rows())
      throw ContractError("gather_rows: index " + std::to_string(src) + " out of range for " +
                          shape_string(x));
    std::copy_n(x.row_span(static_cast<std::size_t>(src)).begin(), x.cols(), out.row_span(r).begin());
  }
  const std::size_t ia = a.id();
  std::vector<std::ptrdiff_t> idx(indices.begin(), indices.end());
  return a.tape().record(
      std::move(out), {ia},
      [ia, idx = std::move(idx)](Tape& t, const Matrix& g) {
        Matrix& ga = t.grad_of(ia);
        for (std::size_t r = 0; r < idx.size(); ++r) {
          if (idx[r] < 0) continue;
          auto dst = ga.row_span(static_cast<std::size_t>(idx[r]));
          auto src = g.row_span(r);
          for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
        }
      },
      "gather_rows");
}

Var rowwise_dot(Var a, Var b) {
  require_same_tape(a, b, "rowwise_dot");
  require_same_shape(a.value(), b.value(), "rowwise_dot");
  const Matrix& av = a.value();
  const Matrix& bv = b.value();
  Matrix out(av.rows(), 1);
  for (std::size_t i = 0; i < av.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < av.cols(); ++j) acc += av(i, j) * bv(i, j);
    out(i, 0) = acc;
  }
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      std::move(out), {ia, ib},
      [ia, ib](Tape& t, const Matrix& g) {
        const Matrix& av2 = t.value(ia);
        const Matrix& bv2 = t.value(ib);
        if (t.requires_grad(ia)) {
          Matrix& ga = t.grad_of(ia);
          for (std::size_t i = 0; i < av2.rows(); ++i)
            for (std::size_t j = 0; j < av2.cols(); ++j) ga(i, j) += g(i, 0) * bv2(i, j);
        }
        if (t.requires_grad(ib)) {
          Matrix& gb = t.grad_of(ib);
          for (std::size_t i = 0; i < av2.rows(); ++i)
            for (std::size_t j = 0; j < av2.cols(); ++j) gb(i, j) += g(i, 0) * av2(i, j);
        }
      },
      "rowwise_dot");
}

Var scale_rows(Var a, Var column) {
  require_same_tape(a, column, "scale_rows");
  const Matrix& av = a.value();
  const Matrix& cv = column.value();
  if (cv.cols() != 1 || cv.rows() != av.rows())
    throw ShapeError("scale_rows: factor column " + shape_string(cv) + " does not match " +
                     shape_string(av));
  Matrix out = av;
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j) out(i, j) *= cv(i, 0);
  const std::size_t ia = a.id(), ic = column.id();
  return a.tape().record(
      std::move(out), {ia, ic},
      [ia, ic](Tape& t, const Matrix& g) {
        const Matrix& av2 = t.value(ia);
        const Matrix& cv2 = t.value(ic);
        if (t.requires_grad(ia)) {
          Matrix& ga = t.grad_of(ia);
          for (std::size_t i = 0; i < av2.rows(); ++i)
            for (std::size_t j = 0; j < av2.cols(); ++j) ga(i, j) += g(i, j) * cv2(i, 0);
        }
        if (t.requires_grad(ic)) {
          Matrix& gc = t.grad_of(ic);
          for (std::size_t i = 0; i < av2.rows(); ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < av2.cols(); ++j) acc += g(i, j) * av2(i, j);
            gc(i, 0) += acc;
          }
        }
      },
      "scale_rows");
}

Var concat_cols(std::span<const Var> blocks) {
  if (blocks.empty()) throw ContractError("concat_cols: no blocks");
  const std::size_t rows = blocks.front().rows();
  std::size_t cols = 0;
  std::vector<std::size_t> ids;
  std::vector<std::size_t> offsets;
  for (const Var& b : blocks) {
    if (&b.tape() != &blocks.front().tape()) throw ContractError("concat_cols: mixed tapes");
    if (b.rows() != rows)
      throw ShapeError("concat_cols: block " + shape_string(b.value()) + " has " +
                       std::to_string(b.rows()) + " rows, expected " + std::to_string(rows));
    ids.push_back(b.id());
    offsets.push_back(cols);
    cols += b.cols();
  }
  Matrix out(rows, cols);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    const Matrix& bv = blocks[k].value();
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < bv.cols(); ++j) out(i, offsets[k] + j) = bv(i, j);
  }
  std::vector<std::size_t> inputs = ids;
  return blocks.front().tape().record(
      std::move(out), std::move(inputs),
      [ids, offsets](Tape& t, const Matrix& g) {
        for (std::size_t k = 0; k < ids.size(); ++k) {
          if (!t.requires_grad(ids[k])) continue;
          Matrix& gb = t.grad_of(ids[k]);
          for (std::size_t i = 0; i < gb.rows(); ++i)
            for (std::size_t j = 0; j < gb.cols(); ++j) gb(i, j) += g(i, offsets[k] + j);
        }
      },
      "concat_cols");
}

Var binary_cross_entropy(Var y, std::span<const double> targets, double eps) {
  const Matrix& yv = y.value();
  if (yv.size() != targets.size())
    throw ShapeError("binary_cross_entropy: " + std::to_string(yv.size()) + " scores vs " +
                     std::to_string(targets.size()) + " targets");
  if (targets.empty()) throw ContractError("binary_cross_entropy: empty input");
  const double n = static_cast<double>(targets.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double p = std::clamp(yv.data()[i], eps, 1.0 - eps);
    acc += targets[i] * std::log(p) + (1.0 - targets[i]) * std::log(1.0 - p);
  }
  const std::size_t iy = y.id();
  std::vector<double> tgt(targets.begin(), targets.end());
  return y.tape().record(
      Matrix(1, 1, -acc / n), {iy},
      [iy, tgt = std::move(tgt), eps, n](Tape& t, const Matrix& g) {
        const Matrix& yv2 = t.value(iy);
        Matrix& gy = t.grad_of(iy);
        for (std::size_t i = 0; i < tgt.size(); ++i) {
          const double p = yv2.data()[i];
          if (p < eps || p > 1.0 - eps) continue;
          gy.data()[i] += g(0, 0) * (-(tgt[i] / p - (1.0 - tgt[i]) / (1.0 - p)) / n);
        }
      },
      "binary_cross_entropy");
}

}  // namespace sumdca::ops
