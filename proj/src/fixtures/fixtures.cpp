#include "topocp/fixtures.hpp"

#include <vector>

namespace topocp::fixtures {
namespace {

using Idx = std::ptrdiff_t;

bool on_square_ring(Idx i, Idx j, Idx lo, Idx hi, Idx t) {
  if (i < lo || j < lo || i > hi || j > hi) return false;
  return i < lo + t || j < lo + t || i > hi - t || j > hi - t;
}

Grid<double> paint(const BinaryMask& m, double fg, double bg) {
  Grid<double> g(m.shape(), bg);
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i]) g[i] = fg;
  }
  return g;
}

}  // namespace

BinaryMask square_ring(std::size_t n, std::size_t margin, std::size_t thickness) {
  BinaryMask m(Shape(n, n));
  const Idx lo = static_cast<Idx>(margin), hi = static_cast<Idx>(n - 1 - margin);
  for (Idx i = 0; i < static_cast<Idx>(n); ++i)
    for (Idx j = 0; j < static_cast<Idx>(n); ++j)
      if (on_square_ring(i, j, lo, hi, static_cast<Idx>(thickness))) m.set({i, j, 0}, true);
  return m;
}

BinaryMask two_blobs() {
  BinaryMask m(Shape(6, 6));
  for (Idx i : {0, 1})
    for (Idx j : {0, 1}) {
      m.set({i + 1, j + 1, 0}, true);
      m.set({i + 1, j + 4, 0}, true);
    }
  return m;
}

BinaryMask hollow_cube() {
  BinaryMask m(Shape(5, 5, 5));
  for (Idx i = 1; i <= 3; ++i)
    for (Idx j = 1; j <= 3; ++j)
      for (Idx k = 1; k <= 3; ++k) m.set({i, j, k}, !(i == 2 && j == 2 && k == 2));
  return m;
}

BinaryMask solid_torus() {
  BinaryMask m(Shape(5, 5, 3));
  for (Idx i = 1; i <= 3; ++i)
    for (Idx j = 1; j <= 3; ++j) m.set({i, j, 1}, !(i == 2 && j == 2));
  return m;
}

Coord weak_ring_cell() { return {3, 8, 0}; }

LikelihoodCase weak_ring() {
  const BinaryMask t = square_ring(16, 3);
  Grid<double> f = paint(t, 0.9, 0.05);
  f.at(weak_ring_cell()) = 0.4;
  return {LikelihoodGrid(std::move(f)), t};
}

LikelihoodCase broken_ring() {
  const BinaryMask t = square_ring(64, 12);
  Grid<double> f = paint(t, 0.9, 0.05);
  f.at({12, 32, 0}) = 0.2;
  return {LikelihoodGrid(std::move(f)), t};
}

LikelihoodCase noisy_target_ring() {
  BinaryMask t = square_ring(64, 12, 2);
  Grid<double> f = paint(t, 0.9, 0.05);
  f.at({12, 32, 0}) = 0.2;
  f.at({13, 32, 0}) = 0.2;
  t.set({12, 32, 0}, false);
  return {LikelihoodGrid(std::move(f)), t};
}

BinaryMask cup(std::size_t n, std::size_t well) {
  BinaryMask m(Shape(n, n, n));
  const Idx lo = static_cast<Idx>((n - well) / 2), hi = lo + static_cast<Idx>(well) - 1;
  for (std::size_t v = 0; v < m.size(); ++v) {
    const Coord c = m.shape().coords(v);
    const bool in_well = c[0] >= 2 && c[1] >= lo && c[1] <= hi && c[2] >= lo && c[2] <= hi;
    m.set(v, !in_well);
  }
  return m;
}

namespace {

ShellCase carve(BinaryMask gt, const std::vector<Coord>& cells) {
  ShellCase s{gt, gt, 0};
  for (const Coord& c : cells) {
    if (s.pred.at(c)) ++s.removed;
    s.pred.set(c, false);
  }
  return s;
}

}  // namespace

ShellCase cup_with_tunnel() { return carve(cup(7, 3), {{0, 3, 3}, {1, 3, 3}}); }

ShellCase dented_cup() { return carve(cup(7, 3), {{0, 3, 3}}); }

ShellCase cup_big_tunnel() {
  std::vector<Coord> cells;
  for (Idx a = 0; a < 2; ++a)
    for (Idx j = 4; j <= 6; ++j)
      for (Idx k = 4; k <= 6; ++k) cells.push_back({a, j, k});
  return carve(cup(11, 7), cells);
}

ShellCase cup_four_tunnels() {
  std::vector<Coord> cells;
  for (Idx a = 0; a < 2; ++a)
    for (Idx j : {3, 7})
      for (Idx k : {3, 7}) cells.push_back({a, j, k});
  return carve(cup(11, 7), cells);
}

}  // namespace topocp::fixtures
