#ifndef NLSEP_HARNESS_SNAPSHOT_HPP
#define NLSEP_HARNESS_SNAPSHOT_HPP

// Binary state snapshot, all fields little-endian:
//
//   "NLS1" | u32 version (1) | u32 M | u32 reserved (0)
//   | f64 L | f64 eps | f64 lambda | f64 t | f64 unused (0)
//   | 2M x (f64 re, f64 im), modes j = -M..M-1

#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "nlsep/errors.hpp"
#include "nlsep/spectral.hpp"

namespace nlsep {

inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 16 + 5 * 8;

inline std::size_t snapshot_size(int half_modes) {
  return kSnapshotHeaderBytes + 2 * static_cast<std::size_t>(half_modes) * 16;
}

struct Snapshot {
  int half_modes = 0;
  double length = 0.0;
  double eps = 0.0;
  double lambda = 0.0;
  FourierState state;
};

namespace snapshot_detail {

inline void PutU32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

inline void PutF64(std::vector<unsigned char>& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(bits >> (8 * i)));
}

inline std::uint32_t GetU32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline double GetF64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return std::bit_cast<double>(v);
}

}  // namespace snapshot_detail

inline std::vector<unsigned char> encode_snapshot(const Grid& g,
                                                  const FourierState& s) {
  using namespace snapshot_detail;
  g.CheckLength(s.coeffs.size());
  std::vector<unsigned char> out;
  out.reserve(snapshot_size(g.half_modes()));
  for (char c : {'N', 'L', 'S', '1'}) out.push_back(static_cast<unsigned char>(c));
  PutU32(out, kSnapshotVersion);
  PutU32(out, static_cast<std::uint32_t>(g.half_modes()));
  PutU32(out, 0);
  PutF64(out, g.length());
  PutF64(out, g.eps());
  PutF64(out, g.lambda());
  PutF64(out, s.t);
  PutF64(out, 0.0);
  for (const auto& c : s.coeffs) {
    PutF64(out, c.real());
    PutF64(out, c.imag());
  }
  return out;
}

inline Snapshot decode_snapshot(const std::vector<unsigned char>& bytes) {
  using namespace snapshot_detail;
  if (bytes.size() < kSnapshotHeaderBytes)
    throw FormatError("snapshot truncated: header incomplete");
  if (bytes[0] != 'N' || bytes[1] != 'L' || bytes[2] != 'S' || bytes[3] != '1')
    throw FormatError("not a snapshot file (bad magic)");
  const std::uint32_t version = GetU32(&bytes[4]);
  if (version != kSnapshotVersion)
    throw FormatError("unsupported snapshot version " + std::to_string(version));
  const std::uint32_t m = GetU32(&bytes[8]);
  if (m < 2 || m > (1u << 28)) throw FormatError("snapshot has invalid M");
  const std::size_t expected = snapshot_size(static_cast<int>(m));
  if (bytes.size() < expected) throw FormatError("snapshot truncated: coefficients incomplete");
  if (bytes.size() > expected) throw FormatError("snapshot has trailing bytes");

  Snapshot snap;
  snap.half_modes = static_cast<int>(m);
  snap.length = GetF64(&bytes[16]);
  snap.eps = GetF64(&bytes[24]);
  snap.lambda = GetF64(&bytes[32]);
  snap.state.t = GetF64(&bytes[40]);
  snap.state.coeffs.resize(2 * static_cast<std::size_t>(m));
  const unsigned char* p = &bytes[kSnapshotHeaderBytes];
  for (auto& c : snap.state.coeffs) {
    c = Complex(GetF64(p), GetF64(p + 8));
    p += 16;
  }
  return snap;
}

inline void write_snapshot(const std::string& path, const Grid& g,
                           const FourierState& s) {
  const auto bytes = encode_snapshot(g, s);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing snapshot '" + path + "'");
}

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open snapshot '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return decode_snapshot(bytes);
}

}  // namespace nlsep

#endif  // NLSEP_HARNESS_SNAPSHOT_HPP
