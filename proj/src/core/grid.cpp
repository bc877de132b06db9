#include "topocp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace topocp {

const char* to_string(IoErrc code) {
  switch (code) {
    case IoErrc::open_failed: return "open failed";
    case IoErrc::write_failed: return "write failed";
    case IoErrc::bad_header_size: return "bad header size";
    case IoErrc::bad_magic: return "bad magic";
    case IoErrc::unsupported_datatype: return "unsupported datatype";
    case IoErrc::bad_dimensions: return "bad dimensions";
    case IoErrc::truncated: return "truncated data";
    case IoErrc::bad_index: return "bad patch index";
  }
  return "unknown";
}

Shape::Shape(std::size_t d0, std::size_t d1) : rank_(2), dims_{d0, d1, 1} {
  if (d0 == 0 || d1 == 0) throw ShapeError("grid extents must be >= 1");
}

Shape::Shape(std::size_t d0, std::size_t d1, std::size_t d2) : rank_(3), dims_{d0, d1, d2} {
  if (d0 == 0 || d1 == 0 || d2 == 0) throw ShapeError("grid extents must be >= 1");
}

Shape Shape::of_rank(int rank, const std::array<std::size_t, 3>& dims) {
  if (rank == 2) return Shape(dims[0], dims[1]);
  if (rank == 3) return Shape(dims[0], dims[1], dims[2]);
  throw ShapeError("grid rank must be 2 or 3, got " + std::to_string(rank));
}

std::string Shape::to_string() const {
  std::string s = std::to_string(dims_[0]) + "x" + std::to_string(dims_[1]);
  if (rank_ == 3) s += "x" + std::to_string(dims_[2]);
  return s;
}

void require_same_shape(const Shape& a, const Shape& b, const char* what) {
  if (!(a == b)) {
    throw ShapeError(std::string(what) + ": shape mismatch " + a.to_string() + " vs " + b.to_string());
  }
}

LikelihoodGrid::LikelihoodGrid(Grid<double> grid) : grid_(std::move(grid)) {
  for (double v : grid_.values()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw ParameterError("likelihood value " + std::to_string(v) + " outside [0, 1]");
    }
  }
}

LikelihoodGrid::LikelihoodGrid(Shape shape, std::vector<double> values, Spacing spacing)
    : LikelihoodGrid(Grid<double>(shape, std::move(values), spacing)) {}

LikelihoodGrid LikelihoodGrid::filled(Shape shape, double value, Spacing spacing) {
  return LikelihoodGrid(Grid<double>(shape, value, spacing));
}

double LikelihoodGrid::max_value() const noexcept {
  const auto v = grid_.values();
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

BinaryMask::BinaryMask(Shape shape, Spacing spacing) : grid_(shape, std::uint8_t{0}, spacing) {}

BinaryMask::BinaryMask(Grid<std::uint8_t> grid) : grid_(std::move(grid)) {
  for (auto v : grid_.values()) {
    if (v > 1) throw ParameterError("mask value " + std::to_string(v) + " is not 0 or 1");
  }
}

BinaryMask::BinaryMask(Shape shape, std::vector<std::uint8_t> values, Spacing spacing)
    : BinaryMask(Grid<std::uint8_t>(shape, std::move(values), spacing)) {}

std::size_t BinaryMask::count() const noexcept {
  const auto v = grid_.values();
  return static_cast<std::size_t>(std::count(v.begin(), v.end(), std::uint8_t{1}));
}

std::vector<Coord> neighbor_offsets(int rank, Adjacency rule) {
  std::vector<Coord> out;
  const int zr = rank == 3 ? 1 : 0;
  for (int a = -1; a <= 1; ++a) {
    for (int b = -1; b <= 1; ++b) {
      for (int c = -zr; c <= zr; ++c) {
        const int nonzero = (a != 0) + (b != 0) + (c != 0);
        if (nonzero == 0) continue;
        if (rule == Adjacency::face && nonzero != 1) continue;
        out.push_back({a, b, c});
      }
    }
  }
  return out;
}

template <class T>
Grid<T> pad(const Grid<T>& g, std::size_t width, T value) {
  const Shape& s = g.shape();
  std::array<std::size_t, 3> dims = s.dims();
  for (int a = 0; a < s.rank(); ++a) dims[a] += 2 * width;
  const Shape ps = Shape::of_rank(s.rank(), dims);
  Grid<T> out(ps, value, g.spacing());
  const std::size_t w2 = s.rank() == 3 ? width : 0;
  for (std::size_t i = 0; i < s.extent(0); ++i) {
    for (std::size_t j = 0; j < s.extent(1); ++j) {
      const T* src = g.data() + s.index(i, j, 0);
      std::copy(src, src + s.extent(2), out.data() + ps.index(i + width, j + width, w2));
    }
  }
  return out;
}

template <class T>
Grid<T> crop(const Grid<T>& g, std::size_t width) {
  const Shape& s = g.shape();
  std::array<std::size_t, 3> dims = s.dims();
  for (int a = 0; a < s.rank(); ++a) {
    if (dims[a] <= 2 * width) throw ShapeError("crop width exceeds grid extent");
    dims[a] -= 2 * width;
  }
  const Shape cs = Shape::of_rank(s.rank(), dims);
  Grid<T> out(cs, T{}, g.spacing());
  const std::size_t w2 = s.rank() == 3 ? width : 0;
  for (std::size_t i = 0; i < cs.extent(0); ++i) {
    for (std::size_t j = 0; j < cs.extent(1); ++j) {
      const T* src = g.data() + s.index(i + width, j + width, w2);
      std::copy(src, src + cs.extent(2), out.data() + cs.index(i, j, 0));
    }
  }
  return out;
}

template <class T>
Grid<T> subgrid(const Grid<T>& g, const Coord& lo, const Shape& shape) {
  Grid<T> out(shape, T{}, g.spacing());
  for (std::size_t i = 0; i < shape.extent(0); ++i) {
    for (std::size_t j = 0; j < shape.extent(1); ++j) {
      const T* src = g.data() + g.shape().index(static_cast<std::size_t>(lo[0]) + i, static_cast<std::size_t>(lo[1]) + j,
                                                static_cast<std::size_t>(lo[2]));
      std::copy(src, src + shape.extent(2), out.data() + shape.index(i, j));
    }
  }
  return out;
}

template Grid<double> subgrid(const Grid<double>&, const Coord&, const Shape&);
template Grid<std::uint8_t> subgrid(const Grid<std::uint8_t>&, const Coord&, const Shape&);
template Grid<double> pad(const Grid<double>&, std::size_t, double);
template Grid<std::uint8_t> pad(const Grid<std::uint8_t>&, std::size_t, std::uint8_t);
template Grid<double> crop(const Grid<double>&, std::size_t);
template Grid<std::uint8_t> crop(const Grid<std::uint8_t>&, std::size_t);

LikelihoodGrid pad_twice(const LikelihoodGrid& g) {
  const Grid<double> inner = pad(g.grid(), 1, g.max_value());
  return LikelihoodGrid(pad(inner, 1, 0.0));
}

BinaryMask threshold(const Grid<double>& g, double gamma) {
  Grid<std::uint8_t> out(g.shape(), std::uint8_t{0}, g.spacing());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i] >= gamma ? 1 : 0;
  return BinaryMask(std::move(out));
}

BinaryMask threshold(const LikelihoodGrid& g, double gamma) { return threshold(g.grid(), gamma); }

LikelihoodGrid to_likelihood(const BinaryMask& m) {
  Grid<double> out(m.shape(), 0.0, m.spacing());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = m[i] ? 1.0 : 0.0;
  return LikelihoodGrid(std::move(out));
}

Standardized standardize(const Grid<double>& g) {
  const auto v = g.values();
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  var /= n;
  Standardized out{Grid<double>(g.shape(), 0.0, g.spacing()), false};
  if (var < 1e-12) {
    out.constant_input = true;
    return out;
  }
  const double inv = 1.0 / std::sqrt(var);
  for (std::size_t i = 0; i < v.size(); ++i) out.values[i] = (v[i] - mean) * inv;
  return out;
}

std::optional<Box> bounding_box(const BinaryMask& m) {
  const Shape& s = m.shape();
  std::optional<Box> box;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m[i]) continue;
    const Coord c = s.coords(i);
    if (!box) {
      box = Box{c, c};
      continue;
    }
    for (int a = 0; a < 3; ++a) {
      box->lo[a] = std::min(box->lo[a], c[a]);
      box->hi[a] = std::max(box->hi[a], c[a]);
    }
  }
  return box;
}

}  // namespace topocp
