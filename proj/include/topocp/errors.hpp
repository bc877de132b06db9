#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace topocp {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid numeric parameter (mp, lambda, stride, ...).
class ParameterError : public Error {
public:
  using Error::Error;
};

/// Two grids that must be co-shaped are not.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// Result is mathematically undefined (empty mask for ASSD / hole ratio, ...).
class ComputationError : public Error {
public:
  using Error::Error;
};

enum class IoErrc {
  open_failed,
  write_failed,
  bad_header_size,
  bad_magic,
  unsupported_datatype,
  bad_dimensions,
  truncated,
  bad_index,
};

const char* to_string(IoErrc code);

class IoError : public Error {
public:
  IoError(IoErrc code, std::uint64_t offset, const std::string& what)
      : Error(std::string(to_string(code)) + " at byte " + std::to_string(offset) + ": " + what),
        code_(code),
        offset_(offset) {}

  IoErrc code() const noexcept { return code_; }
  std::uint64_t offset() const noexcept { return offset_; }

private:
  IoErrc code_;
  std::uint64_t offset_;
};

}  // namespace topocp
