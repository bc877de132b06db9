#pragma once

// Data-parallel kernels (OpenMP). Each has a serial counterpart in
// topocp/reference.hpp that the tests and benchmarks compare against.
// Results do not depend on the thread count.

#include <cstdint>

#include "topocp/grid.hpp"

namespace topocp {

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct DistanceSum {
  double sum = 0.0;
  std::size_t count = 0;
  double mean() const noexcept { return count ? sum / static_cast<double>(count) : 0.0; }
};

namespace kernels {

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt);

/// Euler characteristic of the closed complex formed by the foreground voxels.
std::int64_t euler_characteristic(const BinaryMask& m);

/// Foreground cells with at least one face neighbour in the background; cells
/// outside the grid count as background.
BinaryMask border(const BinaryMask& m);

/// Exact squared Euclidean distance (physical units, per-axis spacing) from
/// every cell to the nearest site. +inf everywhere when there are no sites.
Grid<double> squared_edt(const BinaryMask& sites, const Spacing& spacing);

/// Sum of sqrt(squared_distance) over the cells of `from`.
DistanceSum directed_distance(const BinaryMask& from, const Grid<double>& squared_distance);

}  // namespace kernels
}  // namespace topocp
