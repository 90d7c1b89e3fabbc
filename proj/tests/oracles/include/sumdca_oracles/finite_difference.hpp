#pragma once

#include <functional>
#include <string>
#include <vector>

#include "sumdca/matrix.hpp"

namespace sumdca::oracle {

struct GradCheck {
  std::size_t checked = 0;
  std::size_t failures = 0;
  double worst_excess = 0.0;  // largest |a - n| / allowed
  std::string worst;          // description of the worst entry

  bool ok() const { return failures == 0; }
  void merge(const GradCheck& other);
};

struct FdTolerance {
  double step = 1e-5;
  double relative = 1e-4;
  double absolute_floor = 1e-6;
};

/// Central differences of `f` over every entry of `target`, compared with
/// `analytic`. An entry passes when |a - n| <= max(relative * max(|a|, |n|), floor).
/// `target` is restored afterwards.
GradCheck check_gradient(Matrix& target, const Matrix& analytic, const std::function<double()>& f,
                         const std::string& label, const FdTolerance& tol = {});

/// Central differences of every output of `f` with respect to every entry of
/// `target`; one matrix per output. `target` is restored afterwards.
std::vector<Matrix> numeric_gradients(Matrix& target, const std::function<std::vector<double>()>& f,
                                      double step = 1e-5);

/// Entrywise comparison under the same rule as check_gradient.
GradCheck compare_gradients(const Matrix& analytic, const Matrix& numeric, const std::string& label,
                            const FdTolerance& tol = {});

}  // namespace sumdca::oracle
