#include "nngplab/random.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <numbers>

namespace nngp {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double Stream::normal(std::uint64_t i) const {
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * uniform(i));
}

std::uint64_t Stream::below(std::uint64_t i, std::uint64_t bound) const {
  // Lemire's multiply-shift; the bias is below 2^-64 * bound.
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits(i)) * bound) >> 64);
}

}  // namespace nngp
