#pragma once

#include <gtest/gtest.h>

#include <functional>
#include <vector>

#include "sumdca/ops.hpp"
#include "sumdca/random.hpp"
#include "sumdca_oracles/finite_difference.hpp"
#include "sumdca_oracles/reference.hpp"

namespace sumdca::testing {

using OpBuilder = std::function<Var(Tape&, const std::vector<Var>&)>;

/// Contracts the op output with a fixed random weight matrix so every output
/// entry contributes, then compares tape and finite-difference gradients for
/// every input.
inline ::testing::AssertionResult op_gradients_match(const OpBuilder& build, std::vector<Matrix> inputs,
                                                     std::uint64_t seed = 7) {
  Matrix probe;
  auto scalar = [&](Tape& tape, const std::vector<Var>& vars) {
    const Var out = build(tape, vars);
    if (probe.empty()) {
      Rng rng(seed);
      probe = oracle::random_matrix(rng, out.rows(), out.cols(), -1.0, 1.0);
    }
    return ops::sum(ops::hadamard(out, tape.constant(probe)));
  };
  std::vector<Matrix> analytic;
  {
    Tape tape;
    std::vector<Var> vars;
    for (const Matrix& m : inputs) vars.push_back(tape.variable(m));
    tape.backward(scalar(tape, vars));
    for (const Var& v : vars) analytic.push_back(tape.grad(v));
  }
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const auto numeric = oracle::numeric_gradients(inputs[k], [&] {
      Tape tape;
      std::vector<Var> vars;
      for (const Matrix& m : inputs) vars.push_back(tape.constant(m));
      return std::vector<double>{scalar(tape, vars).scalar()};
    });
    const oracle::GradCheck check = oracle::compare_gradients(analytic[k], numeric[0], "input " + std::to_string(k));
    if (!check.ok()) return ::testing::AssertionFailure() << check.failures << " entries off; worst " << check.worst;
  }
  return ::testing::AssertionSuccess();
}

inline Matrix random_matrix(std::uint64_t seed, std::size_t rows, std::size_t cols, double lo = -1.0,
                            double hi = 1.0) {
  Rng rng(seed);
  return oracle::random_matrix(rng, rows, cols, lo, hi);
}

}  // namespace sumdca::testing
