#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace graphann {

// File problems are reported through io_error (and its subclass format_error
// for malformed contents) so the CLI can map them to a distinct exit code
// from plain argument/validation errors.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class format_error : public io_error {
 public:
  using io_error::io_error;
};

enum class ElemKind : uint8_t { u8, i8, f32 };

inline size_t elem_size(ElemKind k) { return k == ElemKind::f32 ? 4 : 1; }

const char* elem_name(ElemKind k);

// Untyped view of one vector: `dim` packed elements of kind `elem`.
struct VectorView {
  const std::byte* data = nullptr;
  uint32_t dim = 0;
  ElemKind elem = ElemKind::f32;
};

// A vertex id paired with its distance to some query point.
struct Neighbor {
  uint32_t id = 0;
  float dist = 0.0f;
};

inline bool neighbor_less(const Neighbor& a, const Neighbor& b) {
  return a.dist < b.dist || (a.dist == b.dist && a.id < b.id);
}

// splitmix64 finalizer; the workhorse for deriving per-id / per-round seeds.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t mix64(uint64_t a, uint64_t b) { return mix64(a ^ mix64(b)); }

inline uint64_t mix64(uint64_t a, uint64_t b, uint64_t c) {
  return mix64(a ^ mix64(b ^ mix64(c)));
}

// Maps a hash to (0, 1]; never 0 so -log of it stays finite.
inline double uniform_unit(uint64_t h) {
  return static_cast<double>((h >> 11) + 1) * 0x1.0p-53;
}

}  // namespace graphann
