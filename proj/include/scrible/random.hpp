#ifndef SCRIBLE_RANDOM_HPP
#define SCRIBLE_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

#include "scrible/error.hpp"

namespace scrible {

namespace detail {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream_id) {
  return mix64(mix64(seed + kGolden) ^ mix64(stream_id * kGolden + 0x632be59bd9b4e019ULL));
}

}  // namespace detail

/// Counter-based random stream. Output i is a hash of (key, i), where the key
/// is derived from (seed, stream_id), so a stream is fully described by those
/// two integers plus its position. Children from fork() depend only on the
/// parent's identity, never on how far the parent has advanced.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id), key_(detail::derive_key(seed, stream_id)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t position() const { return counter_; }

  std::uint64_t next_u64() {
    const std::uint64_t c = counter_++;
    return detail::mix64(detail::mix64(c * detail::kGolden + key_) ^ key_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; one pair of uniforms per call.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  RngStream fork(std::uint64_t child_id) const {
    return RngStream(seed_, detail::mix64(stream_id_ ^ detail::mix64(child_id + detail::kGolden)));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

inline RngStream fork_stream(const RngStream& rng, std::uint64_t child_id) { return rng.fork(child_id); }

/// Uniform draw from the unit sphere in R^d (normalized Gaussian).
inline Eigen::VectorXd sample_unit_sphere(RngStream& rng, int d) {
  if (d < 1) throw ConfigError("sample_unit_sphere: dimension must be >= 1");
  Eigen::VectorXd v(d);
  for (;;) {
    for (int i = 0; i < d; ++i) v[i] = rng.normal();
    const double n = v.norm();
    if (n > 0.0 && std::isfinite(n)) return v / n;
  }
}

}  // namespace scrible

#endif  // SCRIBLE_RANDOM_HPP
