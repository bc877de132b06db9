#pragma once

// Multiview 2D patch extraction from masked volumes and aggregation of
// per-patch likelihoods back onto the volume.
//
// Views map to array axes: sagittal = axis 0, coronal = axis 1, axial = axis 2.
// A patch lies in the plane of the two remaining axes, in increasing order.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "topocp/grid.hpp"

namespace topocp {

enum class View { sagittal = 0, coronal = 1, axial = 2 };

View parse_view(const std::string& s);
const char* to_string(View v);

struct PatchSpec {
  std::size_t size = 64;
  std::size_t stride = 16;
  std::vector<View> axes{View::axial, View::coronal, View::sagittal};
  bool standardize = true;

  /// Throws ParameterError.
  void validate() const;
};

struct PatchRecord {
  View axis = View::axial;
  std::size_t slice = 0;
  std::array<std::size_t, 2> origin{0, 0};
  Grid<double> data;  ///< size x size.
  bool constant = false;  ///< Standardization saw a constant patch.
};

/// Window origins along one in-plane axis of extent `extent` covering the
/// inclusive range [lo, hi]: lo, lo + stride, ... with the last window
/// clamped to end at the slice edge.
std::vector<std::size_t> window_origins(std::size_t extent, std::size_t lo, std::size_t hi, std::size_t size,
                                        std::size_t stride);

/// Patches of every slice (per selected view) that intersects the brain
/// mask, covering the slice's mask bounding box. Voxels outside the mask
/// are zeroed. Slices smaller than the patch are zero-padded at the far end.
std::vector<PatchRecord> extract_patches(const Grid<double>& volume, const BinaryMask& brain, const PatchSpec& spec);

struct Aggregation {
  LikelihoodGrid likelihood;  ///< Mean of covering predictions; 0 where uncovered.
  BinaryMask mask;            ///< likelihood >= 0.5 on covered voxels.
  Grid<std::uint32_t> coverage;
  bool covered = false;  ///< False when no prediction touched the volume.
};

/// Mean-likelihood vote over all covering predictions (any view, any model).
/// Independent of the order of `predictions` and of the thread count.
Aggregation aggregate(const std::vector<PatchRecord>& predictions, const Shape& volume);

/// Patch directory: index.json plus one raw little-endian float32 tile per
/// patch, each tile checksummed with 64-bit FNV-1a.
struct PatchDir {
  Shape volume;
  std::size_t size = 0;
  std::size_t stride = 0;
  std::vector<PatchRecord> patches;
};

void write_patch_dir(const PatchDir& dir, const std::string& path);
PatchDir read_patch_dir(const std::string& path);

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t n);

}  // namespace topocp
