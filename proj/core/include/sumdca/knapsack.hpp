#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sumdca {

/// Exact 0/1 knapsack over (items x capacity). Returns one flag per item.
/// Among equal-valued optima the item with the lower index is taken.
/// Throws ContractError for mismatched sizes or a zero length.
std::vector<std::uint8_t> knapsack_select(std::span<const std::size_t> lengths,
                                          std::span<const double> scores, std::size_t budget);

/// Sum of scores over selected items, accumulated in index order.
double selection_value(std::span<const double> scores, std::span<const std::uint8_t> selected);
std::size_t selection_length(std::span<const std::size_t> lengths, std::span<const std::uint8_t> selected);

}  // namespace sumdca
