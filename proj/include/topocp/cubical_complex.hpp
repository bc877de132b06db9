#pragma once

// Cubical complex of a voxel grid, with every cell valued by the largest
// adjacent voxel value (voxels are the top-dimensional cells).
//
// Cells live on a grid of extent 2n+1 per axis: an odd coordinate spans a
// voxel along that axis, an even one sits on a voxel boundary. Cell dimension
// is the number of odd coordinates.
//
// Filtration order is decreasing value. Ties are broken by the row-major index
// of the voxel that sets the value, then by cell dimension, then by cell
// index, which yields a total order compatible with the face relation. The
// order is encoded in a 64-bit key whose low 32 bits are the cell index.

#include <array>
#include <cstdint>
#include <vector>

#include "topocp/grid.hpp"

namespace topocp::detail {

inline constexpr std::uint32_t kNoCell = 0xFFFFFFFFu;

class CubicalComplex {
public:
  explicit CubicalComplex(const Grid<double>& values);

  int rank() const noexcept { return rank_; }
  const Shape& voxel_shape() const noexcept { return voxels_.shape(); }
  const Grid<double>& voxel_values() const noexcept { return voxels_; }
  const std::array<std::size_t, 3>& cell_dims() const noexcept { return cell_dims_; }
  std::size_t num_cells() const noexcept { return cell_dims_[0] * cell_dims_[1] * cell_dims_[2]; }

  std::array<std::uint32_t, 3> cell_coords(std::uint32_t cell) const noexcept {
    const std::uint32_t c2 = cell % cell_dims2_;
    cell /= cell_dims2_;
    return {cell / cell_dims1_, cell % cell_dims1_, c2};
  }
  std::uint32_t cell_index(const std::array<std::uint32_t, 3>& c) const noexcept {
    return (c[0] * cell_dims1_ + c[1]) * cell_dims2_ + c[2];
  }
  int dim(std::uint32_t cell) const noexcept;

  /// Adjacent voxel that sets the cell value (row-major index in the voxel grid).
  std::uint32_t critical_voxel(std::uint32_t cell) const noexcept;
  double value(std::uint32_t cell) const noexcept { return voxels_[critical_voxel(cell)]; }
  std::uint64_t key(std::uint32_t cell) const noexcept {
    return (static_cast<std::uint64_t>(voxel_rank_[critical_voxel(cell)]) << 34) |
           (static_cast<std::uint64_t>(dim(cell)) << 32) | cell;
  }
  static std::uint32_t cell_of(std::uint64_t key) noexcept { return static_cast<std::uint32_t>(key); }

  /// Voxel's position in the filtration order of voxels.
  std::uint32_t voxel_rank(std::uint32_t voxel) const noexcept { return voxel_rank_[voxel]; }
  /// Voxel entering last.
  std::uint32_t last_voxel() const noexcept { return last_voxel_; }
  /// Cell index of the top-dimensional cell for a voxel.
  std::uint32_t voxel_cell(std::uint32_t voxel) const noexcept;

  /// Codimension-1 faces / cofaces. Returns the count written to `out`.
  int faces(std::uint32_t cell, std::array<std::uint32_t, 6>& out) const noexcept;
  int cofaces(std::uint32_t cell, std::array<std::uint32_t, 6>& out) const noexcept;

  /// All cells of dimension `d`, sorted by ascending key (keys returned).
  std::vector<std::uint64_t> sorted_keys(int d) const;

private:
  int rank_;
  Grid<double> voxels_;
  std::array<std::size_t, 3> cell_dims_{1, 1, 1};
  std::uint32_t cell_dims1_ = 1;
  std::uint32_t cell_dims2_ = 1;
  std::vector<std::uint32_t> voxel_rank_;
  std::uint32_t last_voxel_ = 0;
};

/// A persistence pair in cell terms. `creator` enters first; `killer` is
/// kNoCell for an essential class.
struct CellPair {
  int dim;
  std::uint32_t creator;
  std::uint32_t killer;
  friend bool operator==(const CellPair&, const CellPair&) = default;
};

/// All pairs (including zero-length ones) for dimensions 0..max_dim, using
/// union-find for dimension 0 and for the top dimension and cohomology
/// reduction for dimension 1 of 3D complexes.
std::vector<CellPair> cell_pairs(const CubicalComplex& cx, int max_dim);

}  // namespace topocp::detail
