#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace sac::binio {

// Explicit little-endian scalar encoding so snapshot and checkpoint files
// have one layout everywhere.

inline void write_u64(std::ostream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint64_t read_u64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  if (!in) throw std::runtime_error("binio: truncated read");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

inline void write_f64(std::ostream& out, double v) {
  write_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline double read_f64(std::istream& in) {
  return std::bit_cast<double>(read_u64(in));
}

inline void write_f64_block(std::ostream& out, const std::vector<double>& v) {
  write_u64(out, v.size());
  for (double x : v) write_f64(out, x);
}

inline std::vector<double> read_f64_block(std::istream& in) {
  std::vector<double> v(read_u64(in));
  for (auto& x : v) x = read_f64(in);
  return v;
}

inline void write_magic(std::ostream& out, const char (&magic)[9]) {
  out.write(magic, 8);
}

inline void expect_magic(std::istream& in, const char (&magic)[9],
                         const std::string& what) {
  char buf[8];
  in.read(buf, 8);
  if (!in || std::memcmp(buf, magic, 8) != 0)
    throw std::runtime_error(what + ": bad magic (wrong or corrupt file)");
}

}  // namespace sac::binio
