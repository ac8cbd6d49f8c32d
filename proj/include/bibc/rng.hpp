#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "bibc/linalg.hpp"

namespace bibc {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// Derives an independent child seed from a base seed and up to two indices.
/// Used to hand each sweep point or curve its own reproducible stream space.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  std::uint64_t h = detail::splitmix64(seed ^ 0x632be59bd9b4e019ULL);
  h = detail::splitmix64(h ^ detail::splitmix64(a));
  return detail::splitmix64(h ^ detail::splitmix64(b + 0x9e3779b97f4a7c15ULL));
}

/// Counter-seeded random stream. Identical (seed, stream) pairs produce
/// identical draws on any platform: the generator is mt19937_64 (fully
/// specified by the standard) and all variate transforms below avoid
/// std::uniform_real_distribution / std::normal_distribution, whose output
/// sequences are implementation-defined. In Monte Carlo loops the stream
/// index is the trial index, which keeps results independent of both thread
/// count and scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : gen_(detail::splitmix64(detail::splitmix64(seed) ^
                                detail::splitmix64(stream + 0xda3e39cb94b95bdbULL))) {}

  /// Uniform on [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  /// Circularly symmetric complex normal CN(0, 1): E z = 0, E |z|^2 = 1.
  cplx cnormal() {
    // Box-Muller; u1 shifted into (0, 1] so the log never sees zero
    double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;
    double u2 = uniform();
    double r = std::sqrt(-std::log(u1));
    return cplx(r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2));
  }

  /// Matrix of iid CN(0, 1) entries, filled column by column in fixed order.
  CMat cnormal_matrix(Eigen::Index rows, Eigen::Index cols) {
    CMat w(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) w(r, c) = cnormal();
    return w;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace bibc
