#pragma once

#include "diffassoc/common.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace diffassoc {

/// Seeded random stream used by every generator and resampler.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// C++ standard. Uniform doubles take the top 53 bits of one draw; normals
/// use the Box-Muller transform (both outputs consumed in order). Bounded
/// integers use rejection sampling. None of this depends on the standard
/// library's implementation-defined distributions, so streams reproduce
/// across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for replicate `index` of master seed `seed`.
  static Rng substream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform();

  /// Uniform on {0, ..., bound - 1}; bound > 0.
  std::uint64_t bounded(std::uint64_t bound);

  double normal();

  /// count x cols matrix of iid standard normals, filled row by row.
  MatrixXd normal_matrix(Index count, Index cols);

  /// A uniformly random `size`-subset of {0, ..., population - 1}, in the
  /// order produced by a partial Fisher-Yates shuffle.
  std::vector<Index> subset(Index population, Index size);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer; used to derive substream seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

}  // namespace diffassoc
