#include "topocp/labeling.hpp"

namespace topocp {

Components label_components(const BinaryMask& m, bool value, Adjacency rule) {
  const Shape& s = m.shape();
  Components out{Grid<std::int32_t>(s, 0, m.spacing()), {}, {}};
  const auto offsets = neighbor_offsets(m.rank(), rule);
  std::vector<std::size_t> stack;

  auto on_border = [&](const Coord& c) {
    for (int a = 0; a < s.rank(); ++a) {
      if (c[a] == 0 || static_cast<std::size_t>(c[a]) + 1 == s.extent(a)) return true;
    }
    return false;
  };

  for (std::size_t seed = 0; seed < s.size(); ++seed) {
    if (m[seed] != value || out.labels[seed] != 0) continue;
    const auto id = static_cast<std::int32_t>(out.sizes.size() + 1);
    std::size_t size = 0;
    bool border = false;
    out.labels[seed] = id;
    stack.push_back(seed);
    while (!stack.empty()) {
      const std::size_t cur = stack.back();
      stack.pop_back();
      ++size;
      const Coord c = s.coords(cur);
      border = border || on_border(c);
      for (const Coord& o : offsets) {
        const Coord n{c[0] + o[0], c[1] + o[1], c[2] + o[2]};
        if (!s.contains(n)) continue;
        const std::size_t ni = s.index(n);
        if (m[ni] != value || out.labels[ni] != 0) continue;
        out.labels[ni] = id;
        stack.push_back(ni);
      }
    }
    out.sizes.push_back(size);
    out.touches_border.push_back(border);
  }
  return out;
}

}  // namespace topocp
