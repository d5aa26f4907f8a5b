#pragma once

#include "opcorrect/common/types.hpp"

#include <cstdint>
#include <random>

namespace opcorrect {

/// SplitMix64 finalizer. Used to derive decorrelated engine seeds from a
/// (seed, stream) pair so that parallel workers never share state.
std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// A seeded random stream. Two streams built from the same (seed, stream)
/// pair produce identical sequences for an identical call sequence.
class RngStream {
public:
  static constexpr const char* kAlgorithm = "mt19937_64(splitmix64(seed,stream))";

  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  double normal() { return normal_(engine_); }
  /// Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }
  std::uint64_t next_u64() { return engine_(); }

  Vector normal_vector(Eigen::Index n);

  /// Child stream keyed by `child`; does not advance this stream.
  RngStream split(std::uint64_t child) const;

  std::mt19937_64& engine() { return engine_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace opcorrect
