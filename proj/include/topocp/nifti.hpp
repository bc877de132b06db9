#pragma once

// Single-file NIfTI-1 (.nii) reading and writing. Uncompressed only;
// datatypes uint8, int16, float32 and float64; either byte order.
// Orientation fields are ignored.

#include <cstdint>
#include <string>
#include <vector>

#include "topocp/grid.hpp"

namespace topocp::nifti {

enum class Datatype : std::int16_t { uint8 = 2, int16 = 4, float32 = 16, float64 = 64 };

inline constexpr std::size_t kHeaderSize = 348;
inline constexpr std::size_t kVoxOffset = 352;

struct Header {
  int rank = 3;
  std::array<std::size_t, 3> dims{1, 1, 1};
  Datatype datatype = Datatype::float32;
  Spacing spacing{1.0, 1.0, 1.0};
  double scl_slope = 0.0;
  double scl_inter = 0.0;
  bool swapped = false;  ///< File byte order differs from the host's.
  std::size_t vox_offset = kVoxOffset;
};

struct Volume {
  Header header;
  Grid<double> values;  ///< Scaled values when scl_slope is nonzero.

  /// Throw ParameterError unless every value is valid for the target type.
  LikelihoodGrid likelihood() const;
  BinaryMask mask() const;
};

/// Parse a complete file image. Errors are IoError with the byte offset of
/// the offending field.
Volume parse(const std::vector<std::uint8_t>& bytes);
Volume read(const std::string& path);

struct WriteOptions {
  Datatype datatype = Datatype::float32;
  bool swap_bytes = false;
};

std::vector<std::uint8_t> serialize(const Grid<double>& values, const WriteOptions& opts = {});
void write(const Grid<double>& values, const std::string& path, const WriteOptions& opts = {});
/// float32 file.
void write(const LikelihoodGrid& f, const std::string& path);
/// uint8 file.
void write(const BinaryMask& m, const std::string& path);

}  // namespace topocp::nifti
