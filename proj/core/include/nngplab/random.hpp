#pragma once

#include <cstdint>
#include <initializer_list>

namespace nngp {

std::uint64_t mix64(std::uint64_t z);

// Counter-based stream: draw i is a pure function of (key, i), so any entry
// can be generated independently of evaluation order or thread count.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}

  Stream child(std::uint64_t tag) const { return Stream(mix64(key_ ^ mix64(tag + 0x632BE59BD9B4E019ULL))); }
  Stream child(std::initializer_list<std::uint64_t> path) const {
    Stream s = *this;
    for (auto t : path) s = s.child(t);
    return s;
  }

  std::uint64_t bits(std::uint64_t i) const { return mix64(key_ + (i + 1) * 0x9E3779B97F4A7C15ULL); }
  // Uniform on the open interval (0, 1).
  double uniform(std::uint64_t i) const { return (static_cast<double>(bits(i) >> 11) + 0.5) * 0x1.0p-53; }
  // Standard normal by inverse CDF of uniform(i).
  double normal(std::uint64_t i) const;
  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t i, std::uint64_t bound) const;

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

// Purpose tags that separate the top-level streams derived from a seed.
namespace tag {
inline constexpr std::uint64_t weights = 1;
inline constexpr std::uint64_t sphere = 2;
inline constexpr std::uint64_t harmonic = 3;
inline constexpr std::uint64_t coefficients = 4;
inline constexpr std::uint64_t shuffle = 5;
inline constexpr std::uint64_t init = 6;
inline constexpr std::uint64_t probe = 7;
inline constexpr std::uint64_t dataset = 8;
}  // namespace tag

}  // namespace nngp
