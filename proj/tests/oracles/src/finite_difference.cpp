#include "sumdca_oracles/finite_difference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace sumdca::oracle {

void GradCheck::merge(const GradCheck& other) {
  checked += other.checked;
  failures += other.failures;
  if (other.worst_excess > worst_excess) {
    worst_excess = other.worst_excess;
    worst = other.worst;
  }
}

std::vector<Matrix> numeric_gradients(Matrix& target, const std::function<std::vector<double>()>& f, double step) {
  std::vector<Matrix> out;
  for (std::size_t i = 0; i < target.size(); ++i) {
    const double saved = target.data()[i];
    target.data()[i] = saved + step;
    const std::vector<double> up = f();
    target.data()[i] = saved - step;
    const std::vector<double> down = f();
    target.data()[i] = saved;
    if (out.empty()) out.assign(up.size(), Matrix(target.rows(), target.cols()));
    for (std::size_t k = 0; k < up.size(); ++k) out[k].data()[i] = (up[k] - down[k]) / (2.0 * step);
  }
  return out;
}

GradCheck compare_gradients(const Matrix& analytic, const Matrix& numeric, const std::string& label,
                            const FdTolerance& tol) {
  if (!analytic.same_shape(numeric)) throw std::invalid_argument("compare_gradients: shape mismatch for " + label);
  GradCheck out;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic.data()[i];
    const double n = numeric.data()[i];
    const double allowed = std::max(tol.relative * std::max(std::abs(a), std::abs(n)), tol.absolute_floor);
    const double excess = std::abs(a - n) / allowed;
    ++out.checked;
    if (!(excess <= 1.0)) ++out.failures;
    if (!(excess <= out.worst_excess)) {
      out.worst_excess = excess;
      char buf[200];
      std::snprintf(buf, sizeof buf, "%s[%zu]: analytic %.10g vs numeric %.10g", label.c_str(), i, a, n);
      out.worst = buf;
    }
  }
  return out;
}

GradCheck check_gradient(Matrix& target, const Matrix& analytic, const std::function<double()>& f,
                         const std::string& label, const FdTolerance& tol) {
  if (!target.same_shape(analytic)) throw std::invalid_argument("check_gradient: shape mismatch for " + label);
  const auto numeric = numeric_gradients(target, [&] { return std::vector<double>{f()}; }, tol.step);
  return compare_gradients(analytic, numeric.front(), label, tol);
}

}  // namespace sumdca::oracle
