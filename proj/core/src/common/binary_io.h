#pragma once

#include <cstdint>
#include <bit>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <type_traits>
#include <vector>

#include "claimforge/error.h"

// Little-endian fixed-width serialization for snapshot and checkpoint files.
// All supported targets are little-endian; values are written as stored.
namespace claimforge::detail {

static_assert(std::endian::native == std::endian::little, "snapshot format assumes little-endian");

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  static_assert(std::is_trivially_copyable_v<T>);
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in) {
  static_assert(std::is_trivially_copyable_v<T>);
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw Error(ErrorCode::kFormatError, "truncated binary payload");
  }
  return value;
}

inline void write_string(std::ostream& out, const std::string& s) {
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in, std::size_t max_len = 1u << 30) {
  const auto n = read_pod<std::uint32_t>(in);
  if (n > max_len) throw Error(ErrorCode::kFormatError, "string length out of range");
  std::string s(n, '\0');
  if (n && !in.read(s.data(), n)) throw Error(ErrorCode::kFormatError, "truncated string");
  return s;
}

template <typename T>
void write_vector(std::ostream& out, const std::vector<T>& v) {
  static_assert(std::is_trivially_copyable_v<T>);
  write_pod<std::uint64_t>(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
std::vector<T> read_vector(std::istream& in, std::size_t max_len = std::size_t{1} << 34) {
  static_assert(std::is_trivially_copyable_v<T>);
  const auto n = read_pod<std::uint64_t>(in);
  if (n > max_len / sizeof(T)) throw Error(ErrorCode::kFormatError, "vector length out of range");
  std::vector<T> v(n);
  if (n && !in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)))) {
    throw Error(ErrorCode::kFormatError, "truncated vector");
  }
  return v;
}

inline void write_magic(std::ostream& out, const char (&magic)[5]) { out.write(magic, 4); }

inline void expect_magic(std::istream& in, const char (&magic)[5]) {
  char got[4] = {};
  if (!in.read(got, 4) || std::memcmp(got, magic, 4) != 0) {
    throw Error(ErrorCode::kFormatError, std::string("bad magic; expected ") + magic);
  }
}

}  // namespace claimforge::detail
