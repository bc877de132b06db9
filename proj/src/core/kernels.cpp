#include "topocp/kernels.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <vector>

#include "topocp/parallel.hpp"

namespace topocp::kernels {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher) along one line.
// `in` is contiguous, `out` strided. `v`, `z` are scratch buffers of at least
// n and n+1 entries.
void edt_line(const double* in, double* out, std::size_t n, std::size_t stride, double w, std::vector<std::size_t>& v,
              std::vector<double>& z) {
  std::ptrdiff_t k = -1;
  for (std::size_t q = 0; q < n; ++q) {
    const double fq = in[q];
    if (fq == kInf) continue;
    const double xq = w * static_cast<double>(q);
    while (k >= 0) {
      const std::size_t p = v[static_cast<std::size_t>(k)];
      const double xp = w * static_cast<double>(p);
      const double s = ((fq + xq * xq) - (in[p] + xp * xp)) / (2.0 * (xq - xp));
      if (s <= z[static_cast<std::size_t>(k)]) {
        --k;
      } else {
        break;
      }
    }
    ++k;
    v[static_cast<std::size_t>(k)] = q;
    z[static_cast<std::size_t>(k)] = k == 0 ? -kInf : 0.0;
    if (k > 0) {
      const std::size_t p = v[static_cast<std::size_t>(k - 1)];
      const double xp = w * static_cast<double>(p);
      z[static_cast<std::size_t>(k)] = ((fq + xq * xq) - (in[p] + xp * xp)) / (2.0 * (xq - xp));
    }
    z[static_cast<std::size_t>(k + 1)] = kInf;
  }
  if (k < 0) {
    for (std::size_t q = 0; q < n; ++q) out[q * stride] = kInf;
    return;
  }
  std::size_t j = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const double x = w * static_cast<double>(q);
    while (z[j + 1] < x) ++j;
    const std::size_t p = v[j];
    const double d = x - w * static_cast<double>(p);
    out[q * stride] = d * d + in[p];
  }
}

}  // namespace

ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt) {
  require_same_shape(pred.shape(), gt.shape(), "confusion");
  const auto p = pred.values();
  const auto g = gt.values();
  const auto n = static_cast<std::ptrdiff_t>(p.size());
  std::size_t tp = 0, fp = 0, fn = 0;
#pragma omp parallel for num_threads(max_threads()) schedule(static) reduction(+ : tp, fp, fn)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const bool a = p[static_cast<std::size_t>(i)] != 0;
    const bool b = g[static_cast<std::size_t>(i)] != 0;
    tp += a && b;
    fp += a && !b;
    fn += !a && b;
  }
  return {tp, fp, fn, p.size() - tp - fp - fn};
}

namespace {

// Euler contribution of the cells whose lowest corner is a vertex, indexed by
// the occupancy of the 2x2x2 voxels around it (bit dx*4 + dy*2 + dz, voxel at
// vertex - 1 + d).
std::array<std::int8_t, 256> euler_table() {
  std::array<std::int8_t, 256> t{};
  for (int cfg = 0; cfg < 256; ++cfg) {
    int chi = 0;
    // open: axes along which the cell extends from the vertex
    for (int open = 0; open < 8; ++open) {
      bool present = false;
      for (int d = 0; d < 8; ++d) {
        if ((d & open) == open && (cfg >> d & 1)) present = true;
      }
      if (present) chi += (std::popcount(static_cast<unsigned>(open)) & 1) ? -1 : 1;
    }
    t[static_cast<std::size_t>(cfg)] = static_cast<std::int8_t>(chi);
  }
  return t;
}

}  // namespace

std::int64_t euler_characteristic(const BinaryMask& m) {
  // A 2D mask is handled as a one-voxel-thick slab, which has the same Euler
  // characteristic.
  static const auto table = euler_table();
  const Shape& s = m.shape();
  const auto n0 = static_cast<std::int64_t>(s.extent(0)), n1 = static_cast<std::int64_t>(s.extent(1));
  const auto n2 = static_cast<std::int64_t>(m.rank() == 3 ? s.extent(2) : 1);
  const std::int64_t p1 = n1 + 2, p2 = n2 + 2;
  std::vector<std::uint8_t> pad(static_cast<std::size_t>((n0 + 2) * p1 * p2), 0);
  const auto vals = m.values();
  for (std::int64_t i = 0; i < n0; ++i)
    for (std::int64_t j = 0; j < n1; ++j)
      for (std::int64_t k = 0; k < n2; ++k)
        pad[static_cast<std::size_t>(((i + 1) * p1 + j + 1) * p2 + k + 1)] =
            vals[static_cast<std::size_t>((i * n1 + j) * n2 + k)] != 0;

  std::int64_t chi = 0;
#pragma omp parallel for num_threads(max_threads()) schedule(static) reduction(+ : chi)
  for (std::int64_t v0 = 0; v0 <= n0; ++v0) {
    for (std::int64_t v1 = 0; v1 <= n1; ++v1) {
      const std::uint8_t* r00 = &pad[static_cast<std::size_t>((v0 * p1 + v1) * p2)];
      const std::uint8_t* r01 = r00 + p2;
      const std::uint8_t* r10 = r00 + p1 * p2;
      const std::uint8_t* r11 = r10 + p2;
      for (std::int64_t v2 = 0; v2 <= n2; ++v2) {
        const unsigned cfg = r00[v2] | r00[v2 + 1] << 1 | r01[v2] << 2 | r01[v2 + 1] << 3 | r10[v2] << 4 |
                             r10[v2 + 1] << 5 | r11[v2] << 6 | r11[v2 + 1] << 7;
        chi += table[cfg];
      }
    }
  }
  return chi;
}

BinaryMask border(const BinaryMask& m) {
  const Shape& s = m.shape();
  const auto offsets = neighbor_offsets(m.rank(), Adjacency::face);
  Grid<std::uint8_t> out(s, std::uint8_t{0}, m.spacing());
  const auto n = static_cast<std::ptrdiff_t>(s.size());
#pragma omp parallel for num_threads(max_threads()) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto idx = static_cast<std::size_t>(i);
    if (!m[idx]) continue;
    const Coord c = s.coords(idx);
    for (const Coord& o : offsets) {
      const Coord nb{c[0] + o[0], c[1] + o[1], c[2] + o[2]};
      if (!s.contains(nb) || !m[s.index(nb)]) {
        out[idx] = 1;
        break;
      }
    }
  }
  return BinaryMask(std::move(out));
}

Grid<double> squared_edt(const BinaryMask& sites, const Spacing& spacing) {
  const Shape& s = sites.shape();
  Grid<double> d(s, kInf, spacing);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (sites[i]) d[i] = 0.0;
  }
  const auto& dims = s.dims();
  const std::array<std::size_t, 3> stride{dims[1] * dims[2], dims[2], 1};
  for (int axis = 0; axis < s.rank(); ++axis) {
    const std::size_t n = dims[axis];
    const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
    const auto lines = static_cast<std::ptrdiff_t>(dims[a1] * dims[a2]);
    const double w = spacing[axis];
#pragma omp parallel num_threads(max_threads())
    {
      std::vector<std::size_t> v(n);
      std::vector<double> z(n + 1);
      std::vector<double> line(n);
#pragma omp for schedule(static)
      for (std::ptrdiff_t l = 0; l < lines; ++l) {
        const std::size_t i1 = static_cast<std::size_t>(l) / dims[a2];
        const std::size_t i2 = static_cast<std::size_t>(l) % dims[a2];
        double* base = d.data() + i1 * stride[a1] + i2 * stride[a2];
        for (std::size_t q = 0; q < n; ++q) line[q] = base[q * stride[axis]];
        edt_line(line.data(), base, n, stride[axis], w, v, z);
      }
    }
  }
  return d;
}

DistanceSum directed_distance(const BinaryMask& from, const Grid<double>& squared_distance) {
  require_same_shape(from.shape(), squared_distance.shape(), "directed_distance");
  // Fixed-size blocks summed in order keep the result independent of the
  // thread count.
  constexpr std::size_t kBlock = 4096;
  const std::size_t n = from.size();
  const auto blocks = static_cast<std::ptrdiff_t>((n + kBlock - 1) / kBlock);
  std::vector<double> partial(static_cast<std::size_t>(blocks), 0.0);
  std::size_t count = 0;
#pragma omp parallel for num_threads(max_threads()) schedule(static) reduction(+ : count)
  for (std::ptrdiff_t b = 0; b < blocks; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kBlock;
    const std::size_t hi = std::min(n, lo + kBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      if (!from[i]) continue;
      s += std::sqrt(squared_distance[i]);
      ++count;
    }
    partial[static_cast<std::size_t>(b)] = s;
  }
  double sum = 0.0;
  for (double s : partial) sum += s;
  return {sum, count};
}

}  // namespace topocp::kernels
