#include "topocp/persistence.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "topocp/cubical_complex.hpp"
#include "topocp/kernels.hpp"
#include "topocp/labeling.hpp"

namespace topocp {
namespace {

void sort_pairs(std::vector<PersistencePair>& v) {
  std::sort(v.begin(), v.end(), [](const PersistencePair& a, const PersistencePair& b) {
    const double pa = a.persistence(), pb = b.persistence();
    if (pa != pb) return pa > pb;
    if (a.birth != b.birth) return a.birth < b.birth;
    if (a.death != b.death) return a.death < b.death;
    if (a.birth_cell != b.birth_cell) return a.birth_cell < b.birth_cell;
    return a.death_cell < b.death_cell;
  });
}

}  // namespace

PersistenceDiagram::PersistenceDiagram(Shape grid_shape, std::size_t offset, double mp,
                                       std::array<std::vector<PersistencePair>, 3> pairs)
    : shape_(grid_shape), offset_(offset), mp_(mp), pairs_(std::move(pairs)) {
  for (auto& v : pairs_) sort_pairs(v);
}

Coord PersistenceDiagram::input_coords(std::size_t cell) const noexcept {
  Coord c = shape_.coords(cell);
  const auto off = static_cast<std::ptrdiff_t>(offset_);
  for (int a = 0; a < shape_.rank(); ++a) c[a] -= off;
  return c;
}

PersistenceDiagram PersistenceDiagram::filtered(double mp) const {
  std::array<std::vector<PersistencePair>, 3> kept;
  for (int k = 0; k < 3; ++k) {
    for (const auto& p : pairs_[k]) {
      if (p.persistence() > mp) kept[k].push_back(p);
    }
  }
  return PersistenceDiagram(shape_, offset_, std::max(mp, mp_), std::move(kept));
}

PersistenceDiagram compute_persistence(const LikelihoodGrid& f, const PersistenceOptions& opts) {
  const double mp = opts.min_persistence;
  if (!(mp >= 0.0 && mp < 1.0)) {
    throw ParameterError("minimum persistence must lie in [0, 1), got " + std::to_string(mp));
  }
  Grid<double> grid;
  std::size_t offset = 0;
  switch (opts.padding) {
    case Padding::none:
      grid = f.grid();
      break;
    case Padding::zero:
      grid = pad(f.grid(), 1, 0.0);
      offset = 1;
      break;
    case Padding::twice:
      grid = pad_twice(f).grid();
      offset = 2;
      break;
  }

  const detail::CubicalComplex cx(grid);
  const auto raw = detail::cell_pairs(cx, opts.max_dim);

  std::array<std::vector<PersistencePair>, 3> pairs;
  for (const auto& cp : raw) {
    const std::uint32_t death_voxel = cx.critical_voxel(cp.creator);
    const std::uint32_t birth_voxel = cp.killer == detail::kNoCell ? cx.last_voxel() : cx.critical_voxel(cp.killer);
    PersistencePair p{cp.dim, grid[birth_voxel], grid[death_voxel], birth_voxel, death_voxel};
    if (p.persistence() > mp) pairs[static_cast<std::size_t>(cp.dim)].push_back(p);
  }
  return PersistenceDiagram(grid.shape(), offset, mp, std::move(pairs));
}

BettiVector betti_numbers(const BinaryMask& m) {
  BettiVector b;
  b.bn0 = foreground_components(m).count();
  if (m.rank() == 3) {
    const Components bg = background_components(m);
    for (bool touches : bg.touches_border) b.bn2 += touches ? 0 : 1;
  }
  const std::int64_t chi = kernels::euler_characteristic(m);
  b.bn1 = static_cast<std::size_t>(static_cast<std::int64_t>(b.bn0 + b.bn2) - chi);
  return b;
}

std::size_t bars_alive(const PersistenceDiagram& d, int dim, double gamma) {
  std::size_t n = 0;
  for (const auto& p : d.pairs(dim)) n += (p.birth < gamma && gamma <= p.death) ? 1 : 0;
  return n;
}

namespace {

std::string coord_string(const Shape& s, std::size_t cell) {
  const Coord c = s.coords(cell);
  std::ostringstream os;
  for (int a = 0; a < s.rank(); ++a) {
    if (a) os << ';';
    os << c[a];
  }
  return os.str();
}

}  // namespace

void write_diagram_csv(const PersistenceDiagram& d, std::ostream& os) {
  os << "dim,birth,death,birth_cell,death_cell\n";
  os << std::setprecision(17);
  for (int k = 0; k < 3; ++k) {
    for (const auto& p : d.pairs(k)) {
      os << p.dim << ',' << p.birth << ',' << p.death << ',' << coord_string(d.grid_shape(), p.birth_cell) << ','
         << coord_string(d.grid_shape(), p.death_cell) << '\n';
    }
  }
}

void write_diagram_csv(const PersistenceDiagram& d, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError(IoErrc::open_failed, 0, path);
  write_diagram_csv(d, os);
  if (!os) throw IoError(IoErrc::write_failed, 0, path);
}

std::string to_string(const BettiVector& b) {
  return std::to_string(b.bn0) + " " + std::to_string(b.bn1) + " " + std::to_string(b.bn2);
}

}  // namespace topocp
