#include "topocp/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace topocp::reference {

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_shape(pred.shape(), gt.shape(), "confusion");
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] && gt[i]) ++c.tp;
    else if (pred[i]) ++c.fp;
    else if (gt[i]) ++c.fn;
    else ++c.tn;
  }
  return c;
}

std::int64_t euler_characteristic(const BinaryMask& m) {
  // Count each cell of the closure once, by visiting every foreground voxel's
  // faces and deduplicating on the cell grid.
  const Shape& s = m.shape();
  const int rank = m.rank();
  std::array<std::size_t, 3> cd{1, 1, 1};
  for (int a = 0; a < rank; ++a) cd[a] = 2 * s.extent(a) + 1;
  std::vector<std::uint8_t> seen(cd[0] * cd[1] * cd[2], 0);
  std::int64_t chi = 0;
  const int zr = rank == 3 ? 1 : 0;
  for (std::size_t v = 0; v < s.size(); ++v) {
    if (!m[v]) continue;
    const Coord c = s.coords(v);
    for (int d0 = -1; d0 <= 1; ++d0) {
      for (int d1 = -1; d1 <= 1; ++d1) {
        for (int d2 = -zr; d2 <= zr; ++d2) {
          const std::size_t x = static_cast<std::size_t>(2 * c[0] + 1 + d0);
          const std::size_t y = static_cast<std::size_t>(2 * c[1] + 1 + d1);
          const std::size_t z = rank == 3 ? static_cast<std::size_t>(2 * c[2] + 1 + d2) : 0;
          const std::size_t idx = (x * cd[1] + y) * cd[2] + z;
          if (seen[idx]) continue;
          seen[idx] = 1;
          const int dim = (d0 == 0) + (d1 == 0) + (rank == 3 && d2 == 0);
          chi += (dim & 1) ? -1 : 1;
        }
      }
    }
  }
  return chi;
}

BinaryMask border(const BinaryMask& m) {
  const Shape& s = m.shape();
  BinaryMask out(s, m.spacing());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!m[i]) continue;
    const Coord c = s.coords(i);
    for (int a = 0; a < m.rank(); ++a) {
      for (int d : {-1, 1}) {
        Coord n = c;
        n[a] += d;
        if (!s.contains(n) || !m.at(n)) out.set(i, true);
      }
    }
  }
  return out;
}

Grid<double> squared_edt(const BinaryMask& sites, const Spacing& spacing) {
  // Separable lower-envelope transform, one axis at a time, single-threaded.
  constexpr double inf = std::numeric_limits<double>::infinity();
  const Shape& s = sites.shape();
  Grid<double> d(s, inf, spacing);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (sites[i]) d[i] = 0.0;
  }
  for (int axis = 0; axis < s.rank(); ++axis) {
    const std::size_t n = s.extent(axis);
    const double w = spacing[axis];
    std::vector<double> f(n), g(n);
    std::vector<std::size_t> v(n);
    std::vector<double> z(n + 1);
    for (std::size_t base = 0; base < s.size(); ++base) {
      Coord c = s.coords(base);
      if (c[axis] != 0) continue;
      for (std::size_t q = 0; q < n; ++q) {
        c[axis] = static_cast<std::ptrdiff_t>(q);
        f[q] = d.at(c);
      }
      int k = -1;
      auto inter = [&](std::size_t q, std::size_t p) {
        const double xq = w * static_cast<double>(q), xp = w * static_cast<double>(p);
        return ((f[q] + xq * xq) - (f[p] + xp * xp)) / (2.0 * (xq - xp));
      };
      for (std::size_t q = 0; q < n; ++q) {
        if (f[q] == inf) continue;
        while (k >= 0 && inter(q, v[static_cast<std::size_t>(k)]) <= z[static_cast<std::size_t>(k)]) --k;
        ++k;
        v[static_cast<std::size_t>(k)] = q;
        z[static_cast<std::size_t>(k)] = k == 0 ? -inf : inter(q, v[static_cast<std::size_t>(k - 1)]);
        z[static_cast<std::size_t>(k) + 1] = inf;
      }
      for (std::size_t q = 0; q < n; ++q) {
        if (k < 0) {
          g[q] = inf;
          continue;
        }
        std::size_t j = 0;
        const double x = w * static_cast<double>(q);
        while (z[j + 1] < x) ++j;
        const double dx = x - w * static_cast<double>(v[j]);
        g[q] = dx * dx + f[v[j]];
      }
      for (std::size_t q = 0; q < n; ++q) {
        c[axis] = static_cast<std::ptrdiff_t>(q);
        d.at(c) = g[q];
      }
    }
  }
  return d;
}

DistanceSum directed_distance(const BinaryMask& from, const Grid<double>& squared_distance) {
  constexpr std::size_t kBlock = 4096;
  DistanceSum out;
  for (std::size_t lo = 0; lo < from.size(); lo += kBlock) {
    double s = 0.0;
    for (std::size_t i = lo; i < std::min(from.size(), lo + kBlock); ++i) {
      if (!from[i]) continue;
      s += std::sqrt(squared_distance[i]);
      ++out.count;
    }
    out.sum += s;
  }
  return out;
}

std::vector<detail::CellPair> cell_pairs_by_reduction(const detail::CubicalComplex& cx) {
  const std::size_t n = cx.num_cells();
  std::vector<std::uint64_t> keys(n);
  for (std::uint32_t c = 0; c < n; ++c) keys[c] = cx.key(c);
  std::sort(keys.begin(), keys.end());
  std::vector<std::uint32_t> pos(n);
  for (std::uint32_t i = 0; i < n; ++i) pos[detail::CubicalComplex::cell_of(keys[i])] = i;

  std::vector<std::vector<std::uint32_t>> columns(n);
  std::array<std::uint32_t, 6> f{};
  for (std::uint32_t j = 0; j < n; ++j) {
    const int k = cx.faces(detail::CubicalComplex::cell_of(keys[j]), f);
    for (int i = 0; i < k; ++i) columns[j].push_back(pos[f[i]]);
    std::sort(columns[j].begin(), columns[j].end());
  }

  constexpr std::uint32_t none = detail::kNoCell;
  std::vector<std::uint32_t> low_owner(n, none);
  std::vector<bool> paired(n, false);
  std::vector<detail::CellPair> out;
  std::vector<std::uint32_t> merged;
  for (std::uint32_t j = 0; j < n; ++j) {
    auto& col = columns[j];
    while (!col.empty() && low_owner[col.back()] != none) {
      const auto& other = columns[low_owner[col.back()]];
      merged.clear();
      std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(), std::back_inserter(merged));
      col.swap(merged);
    }
    if (col.empty()) continue;
    const std::uint32_t low = col.back();
    low_owner[low] = j;
    paired[low] = paired[j] = true;
    const std::uint32_t creator = detail::CubicalComplex::cell_of(keys[low]);
    out.push_back({cx.dim(creator), creator, detail::CubicalComplex::cell_of(keys[j])});
  }
  for (std::uint32_t j = 0; j < n; ++j) {
    if (!paired[j] && columns[j].empty()) {
      const std::uint32_t cell = detail::CubicalComplex::cell_of(keys[j]);
      out.push_back({cx.dim(cell), cell, detail::kNoCell});
    }
  }
  return out;
}

}  // namespace topocp::reference
