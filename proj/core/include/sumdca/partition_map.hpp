#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "sumdca/attention.hpp"

namespace sumdca {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Regular grid of reference points; cell (ix, iy) is sampled at its center.
struct GridSpec {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_min = -1.0;
  double y_max = 1.0;
  std::size_t nx = 200;
  std::size_t ny = 200;

  Point2 cell_center(std::size_t ix, std::size_t iy) const;
};

/// For every grid cell, the index of the seed point with the largest
/// similarity to the cell center (lowest index on ties).
struct PartitionMap {
  GridSpec grid;
  SimilarityKind kind = SimilarityKind::kL2;
  std::vector<std::size_t> winners;  // row-major over (iy, ix)

  std::size_t winner(std::size_t ix, std::size_t iy) const { return winners[iy * grid.nx + ix]; }
  std::size_t region_size(std::size_t point) const;
};

PartitionMap partition_map(std::span<const Point2> points, SimilarityKind kind, const GridSpec& grid);

/// CSV with header `x,y,winner_index`, one line per cell.
void write_partition_csv(std::ostream& out, const PartitionMap& map);

}  // namespace sumdca
