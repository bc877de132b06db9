#include "topocp/nifti.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

namespace topocp::nifti {
namespace {

template <class T>
T load(const std::uint8_t* p, bool swap) {
  std::array<std::uint8_t, sizeof(T)> b;
  std::memcpy(b.data(), p, sizeof(T));
  if (swap) std::reverse(b.begin(), b.end());
  T v;
  std::memcpy(&v, b.data(), sizeof(T));
  return v;
}

template <class T>
void store(std::uint8_t* p, T v, bool swap) {
  std::array<std::uint8_t, sizeof(T)> b;
  std::memcpy(b.data(), &v, sizeof(T));
  if (swap) std::reverse(b.begin(), b.end());
  std::memcpy(p, b.data(), sizeof(T));
}

std::size_t bytes_per_voxel(Datatype t) {
  switch (t) {
    case Datatype::uint8: return 1;
    case Datatype::int16: return 2;
    case Datatype::float32: return 4;
    case Datatype::float64: return 8;
  }
  return 0;
}

bool known_datatype(std::int16_t code) {
  return code == 2 || code == 4 || code == 16 || code == 64;
}

// Header field offsets.
constexpr std::size_t kDim = 40, kDatatype = 70, kBitpix = 72, kPixdim = 76, kVoxOffsetField = 108,
                      kSclSlope = 112, kSclInter = 116, kMagic = 344;

}  // namespace

LikelihoodGrid Volume::likelihood() const { return LikelihoodGrid(values); }

BinaryMask Volume::mask() const {
  Grid<std::uint8_t> g(values.shape(), std::uint8_t{0}, values.spacing());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (v != 0.0 && v != 1.0) throw ParameterError("mask value " + std::to_string(v) + " is not 0 or 1");
    g[i] = v != 0.0 ? 1 : 0;
  }
  return BinaryMask(std::move(g));
}

Volume parse(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4) throw IoError(IoErrc::truncated, bytes.size(), "file shorter than the header size field");
  const std::uint8_t* p = bytes.data();
  bool swap = false;
  if (load<std::int32_t>(p, false) != static_cast<std::int32_t>(kHeaderSize)) {
    if (load<std::int32_t>(p, true) != static_cast<std::int32_t>(kHeaderSize)) {
      throw IoError(IoErrc::bad_header_size, 0, "sizeof_hdr is not 348 in either byte order");
    }
    swap = true;
  }
  if (bytes.size() < kHeaderSize) throw IoError(IoErrc::truncated, bytes.size(), "header shorter than 348 bytes");
  if (std::memcmp(p + kMagic, "n+1\0", 4) != 0) {
    throw IoError(IoErrc::bad_magic, kMagic, "expected single-file magic \"n+1\"");
  }

  Volume v;
  Header& h = v.header;
  h.swapped = swap;

  const auto ndim = load<std::int16_t>(p + kDim, swap);
  if (ndim < 1 || ndim > 7) throw IoError(IoErrc::bad_dimensions, kDim, "dim[0] = " + std::to_string(ndim));
  std::vector<std::size_t> dims;
  for (int i = 1; i <= ndim; ++i) {
    const auto d = load<std::int16_t>(p + kDim + 2 * static_cast<std::size_t>(i), swap);
    if (d < 1) {
      throw IoError(IoErrc::bad_dimensions, kDim + 2 * static_cast<std::size_t>(i),
                    "dim[" + std::to_string(i) + "] = " + std::to_string(d));
    }
    dims.push_back(static_cast<std::size_t>(d));
  }
  while (dims.size() > 2 && dims.back() == 1) dims.pop_back();
  if (dims.size() > 3) {
    throw IoError(IoErrc::bad_dimensions, kDim, "rank " + std::to_string(dims.size()) + " after dropping unit dims");
  }
  while (dims.size() < 2) dims.push_back(1);
  h.rank = static_cast<int>(dims.size());
  for (std::size_t a = 0; a < dims.size(); ++a) h.dims[a] = dims[a];

  const auto code = load<std::int16_t>(p + kDatatype, swap);
  if (!known_datatype(code)) {
    throw IoError(IoErrc::unsupported_datatype, kDatatype, "datatype code " + std::to_string(code));
  }
  h.datatype = static_cast<Datatype>(code);
  (void)kBitpix;

  for (int a = 0; a < 3; ++a) {
    const double s = load<float>(p + kPixdim + 4 * static_cast<std::size_t>(a + 1), swap);
    h.spacing[static_cast<std::size_t>(a)] = std::isfinite(s) && s != 0.0 ? std::abs(s) : 1.0;
  }
  const double off = load<float>(p + kVoxOffsetField, swap);
  if (!(off >= static_cast<double>(kHeaderSize)) || off != std::floor(off)) {
    throw IoError(IoErrc::bad_header_size, kVoxOffsetField, "vox_offset " + std::to_string(off));
  }
  h.vox_offset = static_cast<std::size_t>(off);
  h.scl_slope = load<float>(p + kSclSlope, swap);
  h.scl_inter = load<float>(p + kSclInter, swap);

  const Shape shape = Shape::of_rank(h.rank, h.dims);
  const std::size_t bpv = bytes_per_voxel(h.datatype);
  const std::size_t need = shape.size() * bpv;
  if (h.vox_offset > bytes.size() || bytes.size() - h.vox_offset < need) {
    throw IoError(IoErrc::truncated, bytes.size(),
                  "voxel data needs " + std::to_string(need) + " bytes from offset " + std::to_string(h.vox_offset));
  }

  // NIfTI stores the first axis fastest; the grid stores the last axis fastest.
  v.values = Grid<double>(shape, 0.0, h.spacing);
  const bool scale = h.scl_slope != 0.0 && std::isfinite(h.scl_slope);
  const std::uint8_t* data = p + h.vox_offset;
  std::size_t n = 0;
  for (std::size_t k = 0; k < h.dims[2]; ++k) {
    for (std::size_t j = 0; j < h.dims[1]; ++j) {
      for (std::size_t i = 0; i < h.dims[0]; ++i, ++n) {
        const std::uint8_t* q = data + n * bpv;
        double x = 0.0;
        switch (h.datatype) {
          case Datatype::uint8: x = *q; break;
          case Datatype::int16: x = load<std::int16_t>(q, swap); break;
          case Datatype::float32: x = load<float>(q, swap); break;
          case Datatype::float64: x = load<double>(q, swap); break;
        }
        if (scale) x = h.scl_slope * x + h.scl_inter;
        v.values[shape.index(i, j, k)] = x;
      }
    }
  }
  return v;
}

Volume read(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError(IoErrc::open_failed, 0, path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  try {
    return parse(bytes);
  } catch (const IoError& e) {
    throw IoError(e.code(), e.offset(), path + ": " + e.what());
  }
}

std::vector<std::uint8_t> serialize(const Grid<double>& g, const WriteOptions& opts) {
  const Shape& s = g.shape();
  const std::size_t bpv = bytes_per_voxel(opts.datatype);
  std::vector<std::uint8_t> out(kVoxOffset + s.size() * bpv, 0);
  std::uint8_t* p = out.data();
  const bool sw = opts.swap_bytes;
  store<std::int32_t>(p, static_cast<std::int32_t>(kHeaderSize), sw);
  for (int a = 0; a < s.rank(); ++a) {
    if (s.extent(a) > 32767) throw ParameterError("extent " + std::to_string(s.extent(a)) + " too large for NIfTI-1");
  }
  store<std::int16_t>(p + kDim, static_cast<std::int16_t>(s.rank()), sw);
  for (int i = 1; i <= 7; ++i) {
    const std::size_t d = i <= s.rank() ? s.extent(i - 1) : 1;
    store<std::int16_t>(p + kDim + 2 * static_cast<std::size_t>(i), static_cast<std::int16_t>(d), sw);
  }
  store<std::int16_t>(p + kDatatype, static_cast<std::int16_t>(opts.datatype), sw);
  store<std::int16_t>(p + kBitpix, static_cast<std::int16_t>(8 * bpv), sw);
  store<float>(p + kPixdim, 1.0f, sw);
  for (int a = 0; a < 3; ++a) {
    store<float>(p + kPixdim + 4 * static_cast<std::size_t>(a + 1), static_cast<float>(g.spacing()[static_cast<std::size_t>(a)]), sw);
  }
  store<float>(p + kVoxOffsetField, static_cast<float>(kVoxOffset), sw);
  store<float>(p + kSclSlope, 0.0f, sw);
  store<float>(p + kSclInter, 0.0f, sw);
  std::memcpy(p + kMagic, "n+1\0", 4);

  std::uint8_t* data = p + kVoxOffset;
  std::size_t n = 0;
  for (std::size_t k = 0; k < s.extent(2); ++k) {
    for (std::size_t j = 0; j < s.extent(1); ++j) {
      for (std::size_t i = 0; i < s.extent(0); ++i, ++n) {
        const double x = g[s.index(i, j, k)];
        std::uint8_t* q = data + n * bpv;
        switch (opts.datatype) {
          case Datatype::uint8:
            if (!(x >= 0 && x <= 255 && x == std::floor(x))) throw ParameterError("value not representable as uint8");
            *q = static_cast<std::uint8_t>(x);
            break;
          case Datatype::int16:
            if (!(x >= -32768 && x <= 32767 && x == std::floor(x))) throw ParameterError("value not representable as int16");
            store<std::int16_t>(q, static_cast<std::int16_t>(x), sw);
            break;
          case Datatype::float32: store<float>(q, static_cast<float>(x), sw); break;
          case Datatype::float64: store<double>(q, x, sw); break;
        }
      }
    }
  }
  return out;
}

void write(const Grid<double>& g, const std::string& path, const WriteOptions& opts) {
  const auto bytes = serialize(g, opts);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError(IoErrc::open_failed, 0, path);
  os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError(IoErrc::write_failed, 0, path);
}

void write(const LikelihoodGrid& f, const std::string& path) { write(f.grid(), path, {Datatype::float32, false}); }

void write(const BinaryMask& m, const std::string& path) {
  Grid<double> g(m.shape(), 0.0, m.spacing());
  for (std::size_t i = 0; i < m.size(); ++i) g[i] = m[i] ? 1.0 : 0.0;
  write(g, path, {Datatype::uint8, false});
}

}  // namespace topocp::nifti
