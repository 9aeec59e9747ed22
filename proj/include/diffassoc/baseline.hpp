#pragma once

#include "diffassoc/dataset.hpp"

#include <cstdint>
#include <span>

namespace diffassoc {

/// dCoxS-style score: Pearson correlation between the upper-triangular
/// Euclidean sample distances of X and of Y, Fisher-transformed with r
/// clamped to [-1 + 1e-12, 1 - 1e-12].
double dcoxs_score(const MatrixXd& x, const MatrixXd& y);

/// Two-sided add-one permutation p-value for z_A - z_B. Each replicate
/// reassigns the pooled (X, Y) pairs to groups of the original sizes and
/// rescored both groups; replicate r uses Rng::substream(seed, r).
double dcoxs_test(const PairedDataset& ds, std::size_t reps, std::uint64_t seed, unsigned threads = 1);

/// Score of the sub-sample `rows` given precomputed pooled Euclidean
/// distance matrices.
double dcoxs_score_from_distances(const MatrixXd& dist_x, const MatrixXd& dist_y, std::span<const Index> rows);

}  // namespace diffassoc
