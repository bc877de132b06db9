#pragma once

// Persistent homology of likelihood grids viewed as cubical complexes.
//
// Pairs are reported in threshold coordinates: a structure present in
// threshold(f, g) for every g in (birth, death] yields the pair (birth, death).
// `birth_cell` holds the voxel whose value is `birth` (the voxel that fills the
// structure in as the threshold decreases), `death_cell` the voxel whose value
// is `death` (the voxel that first makes the structure appear).

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "topocp/grid.hpp"

namespace topocp {

struct PersistencePair {
  int dim = 0;
  double birth = 0.0;
  double death = 0.0;
  std::size_t birth_cell = 0;  ///< Row-major index in the diagram's grid.
  std::size_t death_cell = 0;

  double persistence() const noexcept { return death - birth; }
  friend bool operator==(const PersistencePair&, const PersistencePair&) = default;
};

/// How compute_persistence treats its input.
enum class Padding {
  none,  ///< Input already padded; used as-is.
  zero,  ///< One background (0) ring is added. Evaluation path.
  twice, ///< pad_twice is applied (max ring then 0 ring). Loss path.
};

struct PersistenceOptions {
  double min_persistence = 0.01;
  Padding padding = Padding::none;
  int max_dim = -1;  ///< Highest homology dimension; -1 = rank - 1.
};

class PersistenceDiagram {
public:
  PersistenceDiagram() = default;
  PersistenceDiagram(Shape grid_shape, std::size_t offset, double mp, std::array<std::vector<PersistencePair>, 3> pairs);

  /// Pairs of one dimension, sorted by descending persistence, ties by
  /// (birth, death, birth_cell).
  const std::vector<PersistencePair>& pairs(int dim) const { return pairs_.at(static_cast<std::size_t>(dim)); }
  std::size_t count(int dim) const { return pairs(dim).size(); }
  std::size_t total() const noexcept { return pairs_[0].size() + pairs_[1].size() + pairs_[2].size(); }
  double min_persistence() const noexcept { return mp_; }

  /// Shape of the (padded) grid the cells index into.
  const Shape& grid_shape() const noexcept { return shape_; }
  /// Padding width between the caller's grid and grid_shape().
  std::size_t offset() const noexcept { return offset_; }
  /// Coordinates of a cell in the caller's (unpadded) grid; may be negative or
  /// out of range for padding cells.
  Coord input_coords(std::size_t cell) const noexcept;

  /// Same diagram with every pair of persistence <= mp removed.
  PersistenceDiagram filtered(double mp) const;

  friend bool operator==(const PersistenceDiagram&, const PersistenceDiagram&) = default;

private:
  Shape shape_;
  std::size_t offset_ = 0;
  double mp_ = 0.0;
  std::array<std::vector<PersistencePair>, 3> pairs_;
};

/// Throws ParameterError unless 0 <= mp < 1.
PersistenceDiagram compute_persistence(const LikelihoodGrid& f, const PersistenceOptions& opts = {});

struct BettiVector {
  std::size_t bn0 = 0, bn1 = 0, bn2 = 0;
  std::size_t operator[](int k) const noexcept { return k == 0 ? bn0 : (k == 1 ? bn1 : bn2); }
  friend bool operator==(const BettiVector&, const BettiVector&) = default;
};

/// Betti numbers of the foreground, background taken to extend beyond the grid.
/// BN0 and BN2 come from component labelling, BN1 from the Euler characteristic
/// of the closed foreground complex.
BettiVector betti_numbers(const BinaryMask& m);

/// Number of dim-k pairs of `d` alive at threshold gamma (birth < gamma <= death).
std::size_t bars_alive(const PersistenceDiagram& d, int dim, double gamma);

/// CSV with columns dim,birth,death,birth_cell,death_cell; cells are
/// semicolon-separated coordinates in the diagram's grid.
void write_diagram_csv(const PersistenceDiagram& d, std::ostream& os);
void write_diagram_csv(const PersistenceDiagram& d, const std::string& path);

std::string to_string(const BettiVector& b);

}  // namespace topocp
