#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sumdca/matrix.hpp"

namespace sumdca {

/// A trainable matrix together with its gradient accumulator.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;

  Parameter() = default;
  Parameter(std::string n, Matrix v)
      : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()) {}

  void zero_grad() {
    if (!grad.same_shape(value)) grad = Matrix(value.rows(), value.cols());
    grad.fill(0.0);
  }
};

class Tape;

/// Handle to a value recorded on a Tape. Cheap to copy; only valid while the
/// owning Tape is alive.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape& tape() const { return *tape_; }
  std::size_t id() const noexcept { return id_; }
  bool valid() const noexcept { return tape_ != nullptr; }

  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  /// Convenience for 1x1 results.
  double scalar() const;

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Records differentiable operations in execution order and replays them in
/// reverse to accumulate gradients.
///
/// Single-threaded: a Tape and the Parameters bound to it belong to one
/// logical thread. Independent tapes share no state.
class Tape {
 public:
  /// Propagates the output gradient of node `self` into its inputs.
  using BackwardFn = std::function<void(Tape& tape, const Matrix& out_grad)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Non-differentiable input, owned by the tape.
  Var constant(Matrix value);
  /// Non-differentiable input referenced in place; `value` must outlive the tape.
  Var constant_ref(const Matrix& value);
  /// Differentiable leaf owned by the tape; its gradient is read with grad().
  Var variable(Matrix value);
  /// Differentiable leaf bound to `p`: backward() adds the leaf gradient into
  /// p.grad. `p` must outlive the tape.
  Var parameter(Parameter& p);

  /// Appends an operation node. Called by the op implementations.
  Var record(Matrix value, std::vector<std::size_t> inputs, BackwardFn backward,
             std::string_view op_name);

  const Matrix& value(std::size_t id) const;
  bool requires_grad(std::size_t id) const { return nodes_.at(id).requires_grad; }
  /// Gradient accumulator of a node, allocated as zeros on first use.
  Matrix& grad_of(std::size_t id);

  /// Reverse sweep from a 1x1 loss. Gradients accumulate additively, so
  /// calling backward twice without clearing doubles parameter gradients.
  void backward(Var loss);

  /// Gradient of a node after backward(); zeros if nothing flowed into it.
  Matrix grad(Var v) const;

  std::size_t size() const noexcept { return nodes_.size(); }
  std::string_view op_name(std::size_t id) const { return nodes_.at(id).op; }
  /// Node ids in the order the last backward() visited them.
  std::span<const std::size_t> last_backward_order() const noexcept { return visit_order_; }

 private:
  struct Node {
    Matrix owned;
    const Matrix* external = nullptr;
    Matrix grad;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    Parameter* param = nullptr;
    bool requires_grad = false;
    std::string op;
  };

  std::vector<Node> nodes_;
  std::vector<std::size_t> visit_order_;
};

}  // namespace sumdca
