#pragma once

// Deterministic synthetic masks and likelihood maps used by the tests, the
// acceptance suite and the gen-fixtures CLI command.

#include <cstddef>

#include "topocp/grid.hpp"

namespace topocp::fixtures {

/// Square ring of the given thickness with its outer edge `margin` cells in
/// from the border of an n x n grid.
BinaryMask square_ring(std::size_t n, std::size_t margin, std::size_t thickness = 1);
/// Two 2x2 blobs one column apart on a 6x6 grid.
BinaryMask two_blobs();
/// 3x3x3 cube with its centre voxel removed, on a 5x5x5 grid.
BinaryMask hollow_cube();
/// One-voxel-thick square loop in the middle plane of a 5x5x3 grid.
BinaryMask solid_torus();

/// A likelihood map and the mask it is compared against.
struct LikelihoodCase {
  LikelihoodGrid f;
  BinaryMask target;
};

/// 16x16 one-thick ring: ring cells 0.9 except one at 0.4, background 0.05.
LikelihoodCase weak_ring();
/// Coordinates of the 0.4 cell in weak_ring().
Coord weak_ring_cell();

/// 64x64 one-thick ring at 0.9 with a single gap cell at 0.2, background 0.05;
/// target is the closed ring.
LikelihoodCase broken_ring();
/// 64x64 two-thick ring at 0.9 whose gap spans the thickness at 0.2;
/// the target ring is closed but one of the two gap cells is labelled
/// background.
LikelihoodCase noisy_target_ring();

/// Ground truth and prediction for the hole-ratio fixtures.
struct ShellCase {
  BinaryMask gt;
  BinaryMask pred;
  std::size_t removed = 0;  ///< Voxels of gt missing from pred.
};

/// Cup: a cube with a square well open towards high axis-0, walls two voxels
/// thick. `n` is the cube extent, `well` the well width.
BinaryMask cup(std::size_t n, std::size_t well);
/// 7^3 cup with a 1x1 tunnel through its two-voxel bottom wall.
ShellCase cup_with_tunnel();
/// 7^3 cup with a one-voxel dent in the outer bottom surface.
ShellCase dented_cup();
/// 11^3 cup with one 3x3 tunnel through the bottom wall.
ShellCase cup_big_tunnel();
/// 11^3 cup with four 1x1 tunnels through the bottom wall.
ShellCase cup_four_tunnels();

}  // namespace topocp::fixtures
