#include "topocp/cubical_complex.hpp"

#include <algorithm>
#include <numeric>

namespace topocp::detail {

CubicalComplex::CubicalComplex(const Grid<double>& values) : rank_(values.rank()), voxels_(values) {
  for (int a = 0; a < rank_; ++a) cell_dims_[a] = 2 * values.shape().extent(a) + 1;
  if (num_cells() >= kNoCell) throw ParameterError("grid too large for the cubical complex");
  cell_dims1_ = static_cast<std::uint32_t>(cell_dims_[1]);
  cell_dims2_ = static_cast<std::uint32_t>(cell_dims_[2]);

  const std::size_t n = values.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return a < b;
  });
  voxel_rank_.resize(n);
  for (std::uint32_t r = 0; r < n; ++r) voxel_rank_[order[r]] = r;
  last_voxel_ = order.back();
}

int CubicalComplex::dim(std::uint32_t cell) const noexcept {
  const auto c = cell_coords(cell);
  int d = 0;
  for (int a = 0; a < rank_; ++a) d += static_cast<int>(c[a] & 1u);
  return d;
}

std::uint32_t CubicalComplex::voxel_cell(std::uint32_t voxel) const noexcept {
  const Coord v = voxels_.shape().coords(voxel);
  std::array<std::uint32_t, 3> c{0, 0, 0};
  for (int a = 0; a < rank_; ++a) c[a] = static_cast<std::uint32_t>(2 * v[a] + 1);
  return cell_index(c);
}

std::uint32_t CubicalComplex::critical_voxel(std::uint32_t cell) const noexcept {
  const auto c = cell_coords(cell);
  const Shape& vs = voxels_.shape();
  // Candidate voxel range per axis.
  std::array<std::int64_t, 3> lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < rank_; ++a) {
    const std::int64_t x = c[a];
    if (x & 1) {
      lo[a] = hi[a] = (x - 1) / 2;
    } else {
      lo[a] = std::max<std::int64_t>(x / 2 - 1, 0);
      hi[a] = std::min<std::int64_t>(x / 2, static_cast<std::int64_t>(vs.extent(a)) - 1);
    }
  }
  std::uint32_t best = 0;
  std::uint32_t best_rank = kNoCell;
  for (std::int64_t i = lo[0]; i <= hi[0]; ++i) {
    for (std::int64_t j = lo[1]; j <= hi[1]; ++j) {
      for (std::int64_t k = lo[2]; k <= hi[2]; ++k) {
        const auto v = static_cast<std::uint32_t>(vs.index(i, j, k));
        if (voxel_rank_[v] < best_rank) {
          best_rank = voxel_rank_[v];
          best = v;
        }
      }
    }
  }
  return best;
}

int CubicalComplex::faces(std::uint32_t cell, std::array<std::uint32_t, 6>& out) const noexcept {
  auto c = cell_coords(cell);
  int n = 0;
  for (int a = 0; a < rank_; ++a) {
    if ((c[a] & 1u) == 0) continue;
    const std::uint32_t x = c[a];
    c[a] = x - 1;
    out[n++] = cell_index(c);
    c[a] = x + 1;
    out[n++] = cell_index(c);
    c[a] = x;
  }
  return n;
}

int CubicalComplex::cofaces(std::uint32_t cell, std::array<std::uint32_t, 6>& out) const noexcept {
  auto c = cell_coords(cell);
  int n = 0;
  for (int a = 0; a < rank_; ++a) {
    if (c[a] & 1u) continue;
    const std::uint32_t x = c[a];
    if (x > 0) {
      c[a] = x - 1;
      out[n++] = cell_index(c);
    }
    if (x + 1 < cell_dims_[a]) {
      c[a] = x + 1;
      out[n++] = cell_index(c);
    }
    c[a] = x;
  }
  return n;
}

std::vector<std::uint64_t> CubicalComplex::sorted_keys(int d) const {
  std::vector<std::uint64_t> keys;
  const std::size_t total = num_cells();
  std::size_t expected = 0;
  // Rough reservation: cells of dimension d are about C(rank, d) per voxel.
  static constexpr int kBinom[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  expected = voxels_.size() * static_cast<std::size_t>(kBinom[rank_][d]) + total / 8;
  keys.reserve(expected);
  for (std::uint32_t i0 = 0; i0 < cell_dims_[0]; ++i0) {
    for (std::uint32_t i1 = 0; i1 < cell_dims_[1]; ++i1) {
      for (std::uint32_t i2 = 0; i2 < cell_dims_[2]; ++i2) {
        const int cd = static_cast<int>(i0 & 1u) + static_cast<int>(i1 & 1u) + static_cast<int>(i2 & 1u);
        if (cd != d) continue;
        keys.push_back(key(cell_index({i0, i1, i2})));
      }
    }
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

namespace {

class UnionFind {
public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0u); }
  std::uint32_t find(std::uint32_t x) noexcept {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void attach(std::uint32_t child_root, std::uint32_t root) noexcept { parent_[child_root] = root; }

private:
  std::vector<std::uint32_t> parent_;
};

// Dimension 0 by Kruskal over vertices and edges. Marks negative edges.
void zero_dim_pairs(const CubicalComplex& cx, const std::vector<std::uint64_t>& edges,
                    std::vector<bool>& negative_edge, std::vector<CellPair>& out) {
  const auto& cd = cx.cell_dims();
  const std::size_t v1 = (cd[1] + 1) / 2, v2 = (cd[2] + 1) / 2;
  const std::size_t nv = ((cd[0] + 1) / 2) * v1 * v2;
  auto vertex_id = [&](std::uint32_t cell) {
    const auto c = cx.cell_coords(cell);
    return static_cast<std::uint32_t>(((c[0] / 2) * v1 + c[1] / 2) * v2 + c[2] / 2);
  };
  auto vertex_cell = [&](std::uint32_t id) {
    const std::uint32_t z = id % static_cast<std::uint32_t>(v2);
    id /= static_cast<std::uint32_t>(v2);
    return cx.cell_index({2 * (id / static_cast<std::uint32_t>(v1)), 2 * (id % static_cast<std::uint32_t>(v1)),
                          2 * z});
  };
  UnionFind uf(nv);
  // Oldest vertex key per root.
  std::vector<std::uint64_t> birth(nv);
  for (std::uint32_t v = 0; v < nv; ++v) birth[v] = cx.key(vertex_cell(v));

  negative_edge.assign(edges.size(), false);
  std::array<std::uint32_t, 6> f{};
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::uint32_t cell = CubicalComplex::cell_of(edges[e]);
    cx.faces(cell, f);
    std::uint32_t ra = uf.find(vertex_id(f[0]));
    std::uint32_t rb = uf.find(vertex_id(f[1]));
    if (ra == rb) continue;
    if (birth[ra] < birth[rb]) std::swap(ra, rb);  // ra is younger
    out.push_back({0, CubicalComplex::cell_of(birth[ra]), cell});
    uf.attach(ra, rb);
    negative_edge[e] = true;
  }
  std::uint64_t oldest = ~0ull;
  for (std::uint32_t v = 0; v < nv; ++v) {
    if (uf.find(v) == v) oldest = std::min(oldest, birth[v]);
  }
  out.push_back({0, CubicalComplex::cell_of(oldest), kNoCell});
}

// Top-dimensional pairs by union-find on the dual graph (voxels joined through
// shared codimension-1 faces, boundary faces joined to an exterior node),
// sweeping codimension-1 cells in decreasing order.
void top_dim_pairs(const CubicalComplex& cx, const std::vector<std::uint64_t>& codim1,
                   std::vector<CellPair>& out) {
  const int d = cx.rank();
  const Shape& vs = cx.voxel_shape();
  const auto nvox = static_cast<std::uint32_t>(vs.size());
  const std::uint32_t exterior = nvox;
  UnionFind uf(nvox + 1);
  std::vector<std::uint64_t> youngest(nvox + 1);
  for (std::uint32_t v = 0; v < nvox; ++v) youngest[v] = cx.key(cx.voxel_cell(v));
  youngest[exterior] = ~0ull;

  auto voxel_of = [&](std::uint32_t cell) -> std::uint32_t {
    const auto c = cx.cell_coords(cell);
    return static_cast<std::uint32_t>(vs.index(c[0] / 2, c[1] / 2, c[2] / 2));
  };

  std::array<std::uint32_t, 6> cf{};
  for (auto it = codim1.rbegin(); it != codim1.rend(); ++it) {
    const std::uint32_t cell = CubicalComplex::cell_of(*it);
    const int n = cx.cofaces(cell, cf);
    std::uint32_t ra = n > 0 ? uf.find(voxel_of(cf[0])) : exterior;
    std::uint32_t rb = n > 1 ? uf.find(voxel_of(cf[1])) : exterior;
    if (ra == rb) continue;
    if (youngest[ra] > youngest[rb]) std::swap(ra, rb);  // ra dies: its youngest voxel is earlier
    out.push_back({d - 1, cell, CubicalComplex::cell_of(youngest[ra])});
    uf.attach(ra, rb);
  }
}

// Dimension 1 of a 3D complex by reduction of the coboundary matrix of edges,
// processed in reverse filtration order. Negative edges are cleared; apparent
// pairs are taken without reduction.
void one_dim_pairs_3d(const CubicalComplex& cx, const std::vector<std::uint64_t>& edges,
                      const std::vector<bool>& negative_edge, std::vector<CellPair>& out) {
  struct Owner {
    std::uint32_t edge;
    std::int32_t column;  // -1: unreduced coboundary of `edge`
  };
  std::vector<std::uint32_t> owner_of(cx.num_cells(), kNoCell);
  std::vector<Owner> owners;
  std::vector<std::vector<std::uint64_t>> columns;

  std::array<std::uint32_t, 6> buf{};
  auto coboundary = [&](std::uint32_t edge, std::vector<std::uint64_t>& col) {
    const int n = cx.cofaces(edge, buf);
    col.clear();
    for (int i = 0; i < n; ++i) col.push_back(cx.key(buf[i]));
    std::sort(col.begin(), col.end());
  };
  auto max_face_key = [&](std::uint32_t cell) {
    std::array<std::uint32_t, 6> fb{};
    const int n = cx.faces(cell, fb);
    std::uint64_t m = 0;
    for (int i = 0; i < n; ++i) m = std::max(m, cx.key(fb[i]));
    return m;
  };

  std::vector<std::uint64_t> col, other, merged;
  for (std::size_t idx = edges.size(); idx-- > 0;) {
    if (negative_edge[idx]) continue;
    const std::uint64_t ekey = edges[idx];
    const std::uint32_t edge = CubicalComplex::cell_of(ekey);
    coboundary(edge, col);
    if (col.empty()) {
      out.push_back({1, edge, kNoCell});
      continue;
    }
    const std::uint32_t first = CubicalComplex::cell_of(col.front());
    if (max_face_key(first) == ekey) {
      owner_of[first] = static_cast<std::uint32_t>(owners.size());
      owners.push_back({edge, -1});
      out.push_back({1, edge, first});
      continue;
    }
    bool paired = false;
    while (!col.empty()) {
      const std::uint32_t piv = CubicalComplex::cell_of(col.front());
      const std::uint32_t o = owner_of[piv];
      if (o == kNoCell) {
        owner_of[piv] = static_cast<std::uint32_t>(owners.size());
        owners.push_back({edge, static_cast<std::int32_t>(columns.size())});
        columns.push_back(col);
        out.push_back({1, edge, piv});
        paired = true;
        break;
      }
      const std::vector<std::uint64_t>* add = nullptr;
      if (owners[o].column < 0) {
        coboundary(owners[o].edge, other);
        add = &other;
      } else {
        add = &columns[static_cast<std::size_t>(owners[o].column)];
      }
      merged.clear();
      std::set_symmetric_difference(col.begin(), col.end(), add->begin(), add->end(), std::back_inserter(merged));
      col.swap(merged);
    }
    if (!paired) out.push_back({1, edge, kNoCell});
  }
}

}  // namespace

std::vector<CellPair> cell_pairs(const CubicalComplex& cx, int max_dim) {
  std::vector<CellPair> out;
  const int rank = cx.rank();
  if (max_dim < 0 || max_dim > rank - 1) max_dim = rank - 1;

  const std::vector<std::uint64_t> edges = cx.sorted_keys(1);
  std::vector<bool> negative_edge;
  zero_dim_pairs(cx, edges, negative_edge, out);

  if (rank == 2) {
    if (max_dim >= 1) top_dim_pairs(cx, edges, out);
    return out;
  }
  if (max_dim >= 1) one_dim_pairs_3d(cx, edges, negative_edge, out);
  if (max_dim >= 2) top_dim_pairs(cx, cx.sorted_keys(2), out);
  return out;
}

}  // namespace topocp::detail
