#pragma once

#include <cstdint>
#include <vector>

#include "topocp/grid.hpp"

namespace topocp {

struct Components {
  /// 0 for cells not in the labelled set, otherwise 1 + component id.
  Grid<std::int32_t> labels;
  /// Component ids are assigned in row-major order of each component's first cell.
  std::vector<std::size_t> sizes;
  std::vector<bool> touches_border;

  std::size_t count() const noexcept { return sizes.size(); }
};

/// Connected components of the cells equal to `value` under `rule`.
Components label_components(const BinaryMask& m, bool value, Adjacency rule);

inline Components foreground_components(const BinaryMask& m) {
  return label_components(m, true, kConnectivity.foreground);
}
inline Components background_components(const BinaryMask& m) {
  return label_components(m, false, kConnectivity.background);
}

}  // namespace topocp
