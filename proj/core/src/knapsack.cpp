#include "sumdca/knapsack.hpp"

#include <string>

#include "sumdca/errors.hpp"

namespace sumdca {

std::vector<std::uint8_t> knapsack_select(std::span<const std::size_t> lengths,
                                          std::span<const double> scores, std::size_t budget) {
  const std::size_t n = lengths.size();
  if (scores.size() != n)
    throw ContractError("knapsack: " + std::to_string(n) + " lengths but " + std::to_string(scores.size()) +
                        " scores");
  for (std::size_t i = 0; i < n; ++i)
    if (lengths[i] == 0) throw ContractError("knapsack: item " + std::to_string(i) + " has zero length");

  // best[i][c]: optimal value from items i..n-1 with capacity c. Filling from
  // the back lets the forward pass decide items in index order.
  const std::size_t width = budget + 1;
  std::vector<double> best((n + 1) * width, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t c = 0; c <= budget; ++c) {
      const double skip = best[(i + 1) * width + c];
      double v = skip;
      if (lengths[i] <= c) {
        const double take = scores[i] + best[(i + 1) * width + c - lengths[i]];
        if (take > v) v = take;
      }
      best[i * width + c] = v;
    }
  }

  std::vector<std::uint8_t> selected(n, 0);
  std::size_t c = budget;
  for (std::size_t i = 0; i < n; ++i) {
    if (lengths[i] > c) continue;
    const double take = scores[i] + best[(i + 1) * width + c - lengths[i]];
    const double skip = best[(i + 1) * width + c];
    if (take >= skip) {
      selected[i] = 1;
      c -= lengths[i];
    }
  }
  return selected;
}

double selection_value(std::span<const double> scores, std::span<const std::uint8_t> selected) {
  double v = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (selected[i]) v += scores[i];
  return v;
}

std::size_t selection_length(std::span<const std::size_t> lengths, std::span<const std::uint8_t> selected) {
  std::size_t total = 0;
  for (std::size_t i = 0; i < lengths.size(); ++i)
    if (selected[i]) total += lengths[i];
  return total;
}

}  // namespace sumdca
