#include "topocp/patches.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "topocp/parallel.hpp"

namespace topocp {

View parse_view(const std::string& s) {
  if (s == "sagittal") return View::sagittal;
  if (s == "coronal") return View::coronal;
  if (s == "axial") return View::axial;
  throw ParameterError("unknown view '" + s + "' (expected axial, coronal or sagittal)");
}

const char* to_string(View v) {
  switch (v) {
    case View::sagittal: return "sagittal";
    case View::coronal: return "coronal";
    case View::axial: return "axial";
  }
  return "?";
}

void PatchSpec::validate() const {
  if (size == 0) throw ParameterError("patch size must be >= 1");
  if (stride < 1 || stride > size) throw ParameterError("stride must lie in [1, size]");
  if (axes.empty()) throw ParameterError("at least one view is required");
}

namespace {

std::array<int, 2> in_plane(View v) {
  switch (v) {
    case View::sagittal: return {1, 2};
    case View::coronal: return {0, 2};
    case View::axial: return {0, 1};
  }
  return {0, 1};
}

}  // namespace

std::vector<std::size_t> window_origins(std::size_t extent, std::size_t lo, std::size_t hi, std::size_t size,
                                        std::size_t stride) {
  if (extent <= size) return {0};
  const std::size_t last = extent - size;
  std::vector<std::size_t> out;
  for (std::size_t off = lo;; off += stride) {
    const std::size_t o = std::min(off, last);
    out.push_back(o);
    if (o + size >= hi + 1) break;
  }
  return out;
}

std::vector<PatchRecord> extract_patches(const Grid<double>& volume, const BinaryMask& brain, const PatchSpec& spec) {
  spec.validate();
  require_same_shape(volume.shape(), brain.shape(), "extract_patches");
  const Shape& s = volume.shape();
  if (s.rank() != 3) throw ShapeError("patch extraction needs a 3D volume");
  std::vector<PatchRecord> out;
  for (View view : spec.axes) {
    const int axis = static_cast<int>(view);
    const auto [p0, p1] = in_plane(view);
    for (std::size_t sl = 0; sl < s.extent(axis); ++sl) {
      // Per-slice mask bounding box.
      std::size_t lo0 = SIZE_MAX, hi0 = 0, lo1 = SIZE_MAX, hi1 = 0;
      for (std::size_t u = 0; u < s.extent(p0); ++u) {
        for (std::size_t v = 0; v < s.extent(p1); ++v) {
          Coord c{};
          c[axis] = static_cast<std::ptrdiff_t>(sl);
          c[p0] = static_cast<std::ptrdiff_t>(u);
          c[p1] = static_cast<std::ptrdiff_t>(v);
          if (!brain.at(c)) continue;
          lo0 = std::min(lo0, u);
          hi0 = std::max(hi0, u);
          lo1 = std::min(lo1, v);
          hi1 = std::max(hi1, v);
        }
      }
      if (lo0 == SIZE_MAX) continue;
      for (std::size_t o0 : window_origins(s.extent(p0), lo0, hi0, spec.size, spec.stride)) {
        for (std::size_t o1 : window_origins(s.extent(p1), lo1, hi1, spec.size, spec.stride)) {
          PatchRecord r;
          r.axis = view;
          r.slice = sl;
          r.origin = {o0, o1};
          r.data = Grid<double>(Shape(spec.size, spec.size), 0.0);
          for (std::size_t u = 0; u < spec.size && o0 + u < s.extent(p0); ++u) {
            for (std::size_t v = 0; v < spec.size && o1 + v < s.extent(p1); ++v) {
              Coord c{};
              c[axis] = static_cast<std::ptrdiff_t>(sl);
              c[p0] = static_cast<std::ptrdiff_t>(o0 + u);
              c[p1] = static_cast<std::ptrdiff_t>(o1 + v);
              if (brain.at(c)) r.data.at({static_cast<std::ptrdiff_t>(u), static_cast<std::ptrdiff_t>(v), 0}) = volume.at(c);
            }
          }
          if (spec.standardize) {
            Standardized st = standardize(r.data);
            r.data = std::move(st.values);
            r.constant = st.constant_input;
          }
          out.push_back(std::move(r));
        }
      }
    }
  }
  return out;
}

Aggregation aggregate(const std::vector<PatchRecord>& predictions, const Shape& volume) {
  if (volume.rank() != 3) throw ShapeError("aggregation needs a 3D volume");
  for (const auto& p : predictions) {
    if (p.data.rank() != 2 || p.data.shape().extent(0) != p.data.shape().extent(1)) {
      throw ShapeError("patch data must be square and 2D");
    }
    if (p.slice >= volume.extent(static_cast<int>(p.axis))) throw ShapeError("patch slice outside the volume");
    const auto [p0, p1] = in_plane(p.axis);
    if (p.origin[0] >= volume.extent(p0) || p.origin[1] >= volume.extent(p1)) {
      throw ShapeError("patch origin outside the volume");
    }
    for (double v : p.data.values()) {
      if (!(v >= 0.0 && v <= 1.0)) throw ParameterError("predicted likelihood outside [0, 1]");
    }
  }

  // Canonical accumulation order makes the floating-point sums independent
  // of the input order.
  std::vector<std::size_t> order(predictions.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = predictions[a];
    const auto& y = predictions[b];
    const auto kx = std::tuple(static_cast<int>(x.axis), x.slice, x.origin[0], x.origin[1], x.data.size());
    const auto ky = std::tuple(static_cast<int>(y.axis), y.slice, y.origin[0], y.origin[1], y.data.size());
    if (kx != ky) return kx < ky;
    const auto vx = x.data.values(), vy = y.data.values();
    return std::lexicographical_compare(vx.begin(), vx.end(), vy.begin(), vy.end());
  });

  Grid<double> sum(volume, 0.0);
  Grid<std::uint32_t> count(volume, 0u);
  // Each thread owns a slab of axis 0, so voxels are never shared.
  const auto n0 = static_cast<std::ptrdiff_t>(volume.extent(0));
#pragma omp parallel for num_threads(max_threads()) schedule(static)
  for (std::ptrdiff_t i0 = 0; i0 < n0; ++i0) {
    const auto x = static_cast<std::size_t>(i0);
    for (std::size_t idx : order) {
      const PatchRecord& p = predictions[idx];
      const auto [p0, p1] = in_plane(p.axis);
      const std::size_t n = p.data.shape().extent(0);
      const int axis = static_cast<int>(p.axis);
      // Range of patch rows u (first in-plane axis) that land on this slab.
      std::size_t u_lo = 0, u_hi = n;
      if (axis == 0) {
        if (p.slice != x) continue;
      } else {  // p0 == 0
        if (x < p.origin[0] || x >= p.origin[0] + n) continue;
        u_lo = x - p.origin[0];
        u_hi = u_lo + 1;
      }
      for (std::size_t u = u_lo; u < u_hi; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
          Coord c{};
          c[axis] = static_cast<std::ptrdiff_t>(p.slice);
          c[p0] = static_cast<std::ptrdiff_t>(p.origin[0] + u);
          c[p1] = static_cast<std::ptrdiff_t>(p.origin[1] + v);
          if (!volume.contains(c)) continue;
          const std::size_t vi = volume.index(c);
          sum[vi] += p.data.at({static_cast<std::ptrdiff_t>(u), static_cast<std::ptrdiff_t>(v), 0});
          ++count[vi];
        }
      }
    }
  }

  Aggregation a;
  Grid<double> mean(volume, 0.0);
  Grid<std::uint8_t> mask(volume, std::uint8_t{0});
  for (std::size_t i = 0; i < volume.size(); ++i) {
    if (count[i] == 0) continue;
    a.covered = true;
    mean[i] = std::clamp(sum[i] / count[i], 0.0, 1.0);
    mask[i] = mean[i] >= 0.5 ? 1 : 0;
  }
  a.likelihood = LikelihoodGrid(std::move(mean));
  a.mask = BinaryMask(std::move(mask));
  a.coverage = std::move(count);
  return a;
}

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t n) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ull;
  }
  return h;
}

namespace {

std::vector<std::uint8_t> tile_bytes(const Grid<double>& g) {
  std::vector<std::uint8_t> out(g.size() * 4);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const float f = static_cast<float>(g[i]);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    for (int b = 0; b < 4; ++b) out[4 * i + static_cast<std::size_t>(b)] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  return out;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

}  // namespace

void write_patch_dir(const PatchDir& dir, const std::string& path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) throw IoError(IoErrc::open_failed, 0, path + ": " + ec.message());
  nlohmann::ordered_json idx;
  idx["format"] = "topocp-patches";
  idx["version"] = 1;
  idx["dims"] = {dir.volume.extent(0), dir.volume.extent(1), dir.volume.extent(2)};
  idx["size"] = dir.size;
  idx["stride"] = dir.stride;
  idx["dtype"] = "float32-le";
  auto& list = idx["patches"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < dir.patches.size(); ++i) {
    const PatchRecord& p = dir.patches[i];
    char name[32];
    std::snprintf(name, sizeof name, "p%06zu.f32", i);
    const auto bytes = tile_bytes(p.data);
    std::ofstream os(fs::path(path) / name, std::ios::binary);
    if (!os) throw IoError(IoErrc::open_failed, 0, (fs::path(path) / name).string());
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw IoError(IoErrc::write_failed, 0, (fs::path(path) / name).string());
    nlohmann::ordered_json e;
    e["file"] = name;
    e["axis"] = to_string(p.axis);
    e["slice"] = p.slice;
    e["origin"] = {p.origin[0], p.origin[1]};
    e["checksum"] = hex(fnv1a64(bytes.data(), bytes.size()));
    list.push_back(std::move(e));
  }
  std::ofstream os(fs::path(path) / "index.json");
  if (!os) throw IoError(IoErrc::open_failed, 0, path + "/index.json");
  os << idx.dump(1) << '\n';
  if (!os) throw IoError(IoErrc::write_failed, 0, path + "/index.json");
}

PatchDir read_patch_dir(const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path index = fs::path(path) / "index.json";
  std::ifstream is(index);
  if (!is) throw IoError(IoErrc::open_failed, 0, index.string());
  PatchDir dir;
  try {
    const auto idx = nlohmann::json::parse(is);
    const auto dims = idx.at("dims").get<std::vector<std::size_t>>();
    if (dims.size() != 3) throw IoError(IoErrc::bad_index, 0, "dims must have three entries");
    dir.volume = Shape(dims[0], dims[1], dims[2]);
    dir.size = idx.at("size").get<std::size_t>();
    dir.stride = idx.at("stride").get<std::size_t>();
    if (dir.size == 0) throw IoError(IoErrc::bad_index, 0, "size must be positive");
    const std::size_t nbytes = dir.size * dir.size * 4;
    for (const auto& e : idx.at("patches")) {
      PatchRecord p;
      p.axis = parse_view(e.at("axis").get<std::string>());
      p.slice = e.at("slice").get<std::size_t>();
      const auto o = e.at("origin").get<std::vector<std::size_t>>();
      if (o.size() != 2) throw IoError(IoErrc::bad_index, 0, "origin must have two entries");
      p.origin = {o[0], o[1]};
      const fs::path tile = fs::path(path) / e.at("file").get<std::string>();
      std::ifstream ts(tile, std::ios::binary);
      if (!ts) throw IoError(IoErrc::open_failed, 0, tile.string());
      std::vector<std::uint8_t> bytes(nbytes);
      ts.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(nbytes));
      if (static_cast<std::size_t>(ts.gcount()) != nbytes) {
        throw IoError(IoErrc::truncated, static_cast<std::uint64_t>(ts.gcount()), tile.string());
      }
      if (hex(fnv1a64(bytes.data(), nbytes)) != e.at("checksum").get<std::string>()) {
        throw IoError(IoErrc::bad_index, 0, tile.string() + ": checksum mismatch");
      }
      p.data = Grid<double>(Shape(dir.size, dir.size), 0.0);
      for (std::size_t i = 0; i < dir.size * dir.size; ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[4 * i + static_cast<std::size_t>(b)]) << (8 * b);
        float f;
        std::memcpy(&f, &bits, 4);
        p.data[i] = f;
      }
      dir.patches.push_back(std::move(p));
    }
  } catch (const IoError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(IoErrc::bad_index, 0, index.string() + ": " + e.what());
  } catch (const Error& e) {
    throw IoError(IoErrc::bad_index, 0, index.string() + ": " + e.what());
  }
  return dir;
}

}  // namespace topocp
