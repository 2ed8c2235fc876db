#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "cbf/field.hpp"
#include "cbf/params.hpp"

namespace cbf {

/// Solver state persisted to disk.
struct Snapshot {
  double time = 0.0;
  CbfParams params;
  SpectralField u;
};

inline constexpr char kSnapshotMagic[8] = {'C', 'B', 'F', 'S', 'N', 'A', 'P', '1'};

namespace detail {

inline void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}

inline void put_f64(std::vector<unsigned char>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(bits >> (8 * b)));
}

class ByteReader {
 public:
  ByteReader(const std::vector<unsigned char>& data, const std::string& path)
      : data_(data), path_(path) {}

  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw IoError("read_snapshot: truncated file " + path_);
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * b);
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * b);
    return std::bit_cast<double>(v);
  }
  const unsigned char* take(std::size_t n) {
    need(n);
    const unsigned char* p = data_.data() + pos_;
    pos_ += n;
    return p;
  }
  bool at_end() const { return pos_ == data_.size(); }

 private:
  const std::vector<unsigned char>& data_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Layout (little-endian): magic[8], dim u32, n u32, period, time, r, mu, alpha, beta (f64),
/// then for each component n^dim (re, im) f64 pairs in row-major FFT index order.
inline void write_snapshot(const Snapshot& snap, const std::string& path) {
  const auto& g = snap.u.grid();
  std::vector<unsigned char> bytes(kSnapshotMagic, kSnapshotMagic + 8);
  detail::put_u32(bytes, static_cast<std::uint32_t>(g.dim()));
  detail::put_u32(bytes, static_cast<std::uint32_t>(g.n_points()));
  for (double v : {g.period(), snap.time, snap.params.r, snap.params.mu, snap.params.alpha,
                   snap.params.beta})
    detail::put_f64(bytes, v);
  for (int c = 0; c < snap.u.components(); ++c) {
    for (const auto& z : snap.u[c]) {
      detail::put_f64(bytes, z.real());
      detail::put_f64(bytes, z.imag());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("write_snapshot: cannot open " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write_snapshot: write failed for " + path);
}

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_snapshot: cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  detail::ByteReader rd(bytes, path);
  if (std::memcmp(rd.take(8), kSnapshotMagic, 8) != 0)
    throw IoError("read_snapshot: bad magic (expected CBFSNAP1) in " + path);
  const auto dim = static_cast<int>(rd.u32());
  const auto n = static_cast<int>(rd.u32());
  const double period = rd.f64();
  Snapshot snap;
  snap.time = rd.f64();
  snap.params.r = rd.f64();
  snap.params.mu = rd.f64();
  snap.params.alpha = rd.f64();
  snap.params.beta = rd.f64();
  TorusGrid grid = [&] {
    try {
      return TorusGrid(dim, n, period);
    } catch (const Error& e) {
      throw IoError("read_snapshot: invalid grid header in " + path + ": " + e.what());
    }
  }();
  snap.u = SpectralField::vector(grid);
  for (int c = 0; c < snap.u.components(); ++c) {
    for (auto& z : snap.u[c]) {
      const double re = rd.f64();
      z = cplx(re, rd.f64());
    }
  }
  if (!rd.at_end()) throw IoError("read_snapshot: trailing bytes in " + path);
  return snap;
}

}  // namespace cbf
