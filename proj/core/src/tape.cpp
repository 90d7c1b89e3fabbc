#include "sumdca/tape.hpp"

#include <algorithm>

#include "sumdca/errors.hpp"

namespace sumdca {

const Matrix& Var::value() const { return tape_->value(id_); }

double Var::scalar() const {
  const Matrix& m = value();
  if (m.rows() != 1 || m.cols() != 1)
    throw ContractError("scalar() on non-scalar value of shape " + shape_string(m));
  return m(0, 0);
}

Var Tape::constant(Matrix value) {
  Node n;
  n.owned = std::move(value);
  n.op = "constant";
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

Var Tape::constant_ref(const Matrix& value) {
  Node n;
  n.external = &value;
  n.op = "constant";
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

Var Tape::variable(Matrix value) {
  Node n;
  n.owned = std::move(value);
  n.requires_grad = true;
  n.op = "variable";
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

Var Tape::parameter(Parameter& p) {
  Node n;
  n.external = &p.value;
  n.param = &p;
  n.requires_grad = true;
  n.op = "parameter:" + p.name;
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

Var Tape::record(Matrix value, std::vector<std::size_t> inputs, BackwardFn backward,
                 std::string_view op_name) {
  Node n;
  n.owned = std::move(value);
  n.requires_grad = std::any_of(inputs.begin(), inputs.end(),
                                [this](std::size_t id) { return nodes_.at(id).requires_grad; });
  if (n.requires_grad) n.backward = std::move(backward);
  n.inputs = std::move(inputs);
  n.op = op_name;
  nodes_.push_back(std::move(n));
  return {this, nodes_.size() - 1};
}

const Matrix& Tape::value(std::size_t id) const {
  const Node& n = nodes_.at(id);
  return n.external != nullptr ? *n.external : n.owned;
}

Matrix& Tape::grad_of(std::size_t id) {
  Node& n = nodes_.at(id);
  const Matrix& v = value(id);
  if (!n.grad.same_shape(v)) n.grad = Matrix(v.rows(), v.cols());
  return n.grad;
}

void Tape::backward(Var loss) {
  if (loss.valid() && &loss.tape() != this)
    throw ContractError("backward: loss was recorded on a different tape");
  const Matrix& lv = value(loss.id());
  if (lv.rows() != 1 || lv.cols() != 1)
    throw ContractError("backward: loss must be 1x1, got " + shape_string(lv));

  for (Node& n : nodes_) n.grad = Matrix();
  visit_order_.clear();
  grad_of(loss.id())(0, 0) = 1.0;

  for (std::size_t i = loss.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.empty()) continue;
    visit_order_.push_back(i);
    if (n.backward) {
      // The closure may allocate other nodes' grads; copy-free since nodes_
      // does not grow during the sweep.
      n.backward(*this, n.grad);
    }
    if (n.param != nullptr) {
      if (!n.param->grad.same_shape(n.param->value)) n.param->zero_grad();
      n.param->grad += n.grad;
    }
  }
}

Matrix Tape::grad(Var v) const {
  const Node& n = nodes_.at(v.id());
  const Matrix& val = value(v.id());
  if (n.grad.same_shape(val)) return n.grad;
  return Matrix(val.rows(), val.cols());
}

}  // namespace sumdca
