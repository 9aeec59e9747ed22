#include "diffassoc/random.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace diffassoc {

std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t index) {
  return Rng(mix_seed(mix_seed(seed) ^ mix_seed(~index)));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::bounded(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorKind::InvalidArgument, "Rng::bounded: bound must be positive");
  // 2^64 - threshold is a multiple of bound.
  const std::uint64_t threshold = (0 - bound) % bound;
  std::uint64_t x = engine_();
  while (x < threshold) x = engine_();
  return x % bound;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

MatrixXd Rng::normal_matrix(Index count, Index cols) {
  MatrixXd out(count, cols);
  for (Index i = 0; i < count; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = normal();
  return out;
}

std::vector<Index> Rng::subset(Index population, Index size) {
  if (size < 0 || size > population)
    throw Error(ErrorKind::InvalidArgument, "Rng::subset: size out of range");
  std::vector<Index> pool(static_cast<std::size_t>(population));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < size; ++i) {
    const auto j = i + static_cast<Index>(bounded(static_cast<std::uint64_t>(population - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(size));
  return pool;
}

}  // namespace diffassoc
