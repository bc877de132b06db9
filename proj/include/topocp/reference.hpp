#pragma once

// Serial reference implementations. They favour the plainest correct
// formulation and exist to cross-check the optimized paths in tests and
// benchmarks.

#include <vector>

#include "topocp/cubical_complex.hpp"
#include "topocp/kernels.hpp"

namespace topocp::reference {

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt);
std::int64_t euler_characteristic(const BinaryMask& m);
BinaryMask border(const BinaryMask& m);
Grid<double> squared_edt(const BinaryMask& sites, const Spacing& spacing);
DistanceSum directed_distance(const BinaryMask& from, const Grid<double>& squared_distance);

/// Standard column reduction of the full boundary matrix, cells in key order.
std::vector<detail::CellPair> cell_pairs_by_reduction(const detail::CubicalComplex& cx);

}  // namespace topocp::reference
