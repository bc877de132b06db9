#pragma once

// Grid containers shared by every module.
//
// Storage is row-major with the last axis fastest. 2D grids are stored with a
// trailing extent of 1 so the same index arithmetic serves both ranks.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topocp/errors.hpp"

namespace topocp {

using Coord = std::array<std::ptrdiff_t, 3>;

class Shape {
public:
  Shape() = default;
  Shape(std::size_t d0, std::size_t d1);
  Shape(std::size_t d0, std::size_t d1, std::size_t d2);
  static Shape of_rank(int rank, const std::array<std::size_t, 3>& dims);

  int rank() const noexcept { return rank_; }
  std::size_t extent(int axis) const noexcept { return dims_[static_cast<std::size_t>(axis)]; }
  const std::array<std::size_t, 3>& dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return dims_[0] * dims_[1] * dims_[2]; }

  std::size_t index(std::size_t i, std::size_t j, std::size_t k = 0) const noexcept {
    return (i * dims_[1] + j) * dims_[2] + k;
  }
  std::size_t index(const Coord& c) const noexcept {
    return index(static_cast<std::size_t>(c[0]), static_cast<std::size_t>(c[1]),
                 static_cast<std::size_t>(c[2]));
  }
  Coord coords(std::size_t idx) const noexcept {
    const auto k = idx % dims_[2];
    idx /= dims_[2];
    return {static_cast<std::ptrdiff_t>(idx / dims_[1]), static_cast<std::ptrdiff_t>(idx % dims_[1]),
            static_cast<std::ptrdiff_t>(k)};
  }
  bool contains(const Coord& c) const noexcept {
    for (int a = 0; a < 3; ++a) {
      if (c[a] < 0 || static_cast<std::size_t>(c[a]) >= dims_[a]) return false;
    }
    return true;
  }

  std::string to_string() const;
  friend bool operator==(const Shape&, const Shape&) = default;

private:
  int rank_ = 3;
  std::array<std::size_t, 3> dims_{1, 1, 1};
};

using Spacing = std::array<double, 3>;

template <class T>
class Grid {
public:
  using value_type = T;

  Grid() = default;
  explicit Grid(Shape shape, T fill = T{}, Spacing spacing = {1.0, 1.0, 1.0})
      : shape_(shape), spacing_(spacing), data_(shape.size(), fill) {}
  Grid(Shape shape, std::vector<T> data, Spacing spacing = {1.0, 1.0, 1.0})
      : shape_(shape), spacing_(spacing), data_(std::move(data)) {
    if (data_.size() != shape_.size()) {
      throw ShapeError("grid data size " + std::to_string(data_.size()) + " does not match shape " +
                       shape_.to_string());
    }
  }

  const Shape& shape() const noexcept { return shape_; }
  int rank() const noexcept { return shape_.rank(); }
  std::size_t size() const noexcept { return data_.size(); }
  const Spacing& spacing() const noexcept { return spacing_; }
  void set_spacing(const Spacing& s) noexcept { spacing_ = s; }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }
  T& at(const Coord& c) noexcept { return data_[shape_.index(c)]; }
  const T& at(const Coord& c) const noexcept { return data_[shape_.index(c)]; }

  std::span<T> values() noexcept { return data_; }
  std::span<const T> values() const noexcept { return data_; }
  T* data() noexcept { return data_.data(); }
  const T* data() const noexcept { return data_.data(); }

  friend bool operator==(const Grid&, const Grid&) = default;

private:
  Shape shape_;
  Spacing spacing_{1.0, 1.0, 1.0};
  std::vector<T> data_;
};

/// Real-valued map with every value in [0, 1].
class LikelihoodGrid {
public:
  LikelihoodGrid() = default;
  /// Throws ParameterError if any value lies outside [0, 1] or is NaN.
  explicit LikelihoodGrid(Grid<double> grid);
  LikelihoodGrid(Shape shape, std::vector<double> values, Spacing spacing = {1.0, 1.0, 1.0});
  static LikelihoodGrid filled(Shape shape, double value, Spacing spacing = {1.0, 1.0, 1.0});

  const Grid<double>& grid() const noexcept { return grid_; }
  const Shape& shape() const noexcept { return grid_.shape(); }
  int rank() const noexcept { return grid_.rank(); }
  std::size_t size() const noexcept { return grid_.size(); }
  const Spacing& spacing() const noexcept { return grid_.spacing(); }
  double operator[](std::size_t i) const noexcept { return grid_[i]; }
  std::span<const double> values() const noexcept { return grid_.values(); }

  double max_value() const noexcept;

private:
  Grid<double> grid_;
};

class BinaryMask {
public:
  BinaryMask() = default;
  explicit BinaryMask(Shape shape, Spacing spacing = {1.0, 1.0, 1.0});
  /// Throws ParameterError unless every value is exactly 0 or 1.
  explicit BinaryMask(Grid<std::uint8_t> grid);
  BinaryMask(Shape shape, std::vector<std::uint8_t> values, Spacing spacing = {1.0, 1.0, 1.0});

  const Grid<std::uint8_t>& grid() const noexcept { return grid_; }
  const Shape& shape() const noexcept { return grid_.shape(); }
  int rank() const noexcept { return grid_.rank(); }
  std::size_t size() const noexcept { return grid_.size(); }
  const Spacing& spacing() const noexcept { return grid_.spacing(); }
  void set_spacing(const Spacing& s) noexcept { grid_.set_spacing(s); }

  bool operator[](std::size_t i) const noexcept { return grid_[i] != 0; }
  bool at(const Coord& c) const noexcept { return grid_.at(c) != 0; }
  void set(std::size_t i, bool v) noexcept { grid_[i] = v ? 1 : 0; }
  void set(const Coord& c, bool v) noexcept { grid_.at(c) = v ? 1 : 0; }
  std::span<const std::uint8_t> values() const noexcept { return grid_.values(); }

  std::size_t count() const noexcept;
  bool empty() const noexcept { return count() == 0; }

  friend bool operator==(const BinaryMask& a, const BinaryMask& b) {
    return a.grid_.shape() == b.grid_.shape() && std::equal(a.grid_.values().begin(), a.grid_.values().end(),
                                                            b.grid_.values().begin());
  }

private:
  Grid<std::uint8_t> grid_;
};

enum class Adjacency { face, full };

/// Foreground cells connect through any shared corner (8 in 2D, 26 in 3D);
/// background cells only through shared faces (4 / 6). The two rules are
/// always used as this dual pair.
struct Connectivity {
  Adjacency foreground = Adjacency::full;
  Adjacency background = Adjacency::face;
};

inline constexpr Connectivity kConnectivity{};

/// Neighbor offsets for the given rank and rule, excluding the origin.
std::vector<Coord> neighbor_offsets(int rank, Adjacency rule);

/// Constant-value border of `width` cells on every axis of the grid's rank.
template <class T>
Grid<T> pad(const Grid<T>& g, std::size_t width, T value);

/// Inner 1-cell ring at max(g), outer 1-cell ring at 0.
LikelihoodGrid pad_twice(const LikelihoodGrid& g);

/// Drops `width` cells on each side of every axis.
template <class T>
Grid<T> crop(const Grid<T>& g, std::size_t width);

BinaryMask threshold(const LikelihoodGrid& g, double gamma);
BinaryMask threshold(const Grid<double>& g, double gamma);

LikelihoodGrid to_likelihood(const BinaryMask& m);

/// Inclusive bounding box of the foreground.
struct Box {
  Coord lo{0, 0, 0};
  Coord hi{0, 0, 0};
};
std::optional<Box> bounding_box(const BinaryMask& m);

/// Copy of the block of `g` starting at `lo` with the given shape.
template <class T>
Grid<T> subgrid(const Grid<T>& g, const Coord& lo, const Shape& shape);

struct Standardized {
  Grid<double> values;
  bool constant_input = false;
};

/// Zero mean, unit population variance. Constant input yields zeros and sets
/// `constant_input`.
Standardized standardize(const Grid<double>& g);

void require_same_shape(const Shape& a, const Shape& b, const char* what);

}  // namespace topocp
