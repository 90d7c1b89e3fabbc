#include "sumdca/partition_map.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "sumdca/errors.hpp"

namespace sumdca {

Point2 GridSpec::cell_center(std::size_t ix, std::size_t iy) const {
  const double dx = (x_max - x_min) / static_cast<double>(nx);
  const double dy = (y_max - y_min) / static_cast<double>(ny);
  return {x_min + (static_cast<double>(ix) + 0.5) * dx, y_min + (static_cast<double>(iy) + 0.5) * dy};
}

std::size_t PartitionMap::region_size(std::size_t point) const {
  return static_cast<std::size_t>(std::count(winners.begin(), winners.end(), point));
}

PartitionMap partition_map(std::span<const Point2> points, SimilarityKind kind, const GridSpec& grid) {
  if (points.size() < 2) throw ContractError("partition_map: need at least two points");
  const bool all_same = std::all_of(points.begin(), points.end(), [&](const Point2& p) {
    return p.x == points.front().x && p.y == points.front().y;
  });
  if (all_same) throw ContractError("partition_map: all points are identical");
  if (grid.nx == 0 || grid.ny == 0 || !(grid.x_max > grid.x_min) || !(grid.y_max > grid.y_min))
    throw ContractError("partition_map: empty grid");

  Matrix seeds(points.size(), 2);
  for (std::size_t k = 0; k < points.size(); ++k) {
    seeds(k, 0) = points[k].x;
    seeds(k, 1) = points[k].y;
  }
  Matrix refs(grid.nx * grid.ny, 2);
  for (std::size_t iy = 0; iy < grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < grid.nx; ++ix) {
      const Point2 c = grid.cell_center(ix, iy);
      refs(iy * grid.nx + ix, 0) = c.x;
      refs(iy * grid.nx + ix, 1) = c.y;
    }
  }

  const Matrix sim = pairwise_similarity(refs, seeds, kind, 1.0);
  PartitionMap map{grid, kind, std::vector<std::size_t>(refs.rows())};
  for (std::size_t c = 0; c < refs.rows(); ++c) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < seeds.rows(); ++k)
      if (sim(c, k) > sim(c, best)) best = k;
    map.winners[c] = best;
  }
  return map;
}

void write_partition_csv(std::ostream& out, const PartitionMap& map) {
  out << "x,y,winner_index\n";
  for (std::size_t iy = 0; iy < map.grid.ny; ++iy) {
    for (std::size_t ix = 0; ix < map.grid.nx; ++ix) {
      const Point2 c = map.grid.cell_center(ix, iy);
      out << c.x << ',' << c.y << ',' << map.winner(ix, iy) << '\n';
    }
  }
}

}  // namespace sumdca
