#pragma once

#include "diffassoc/common.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace diffassoc {

struct DatasetMeta {
  std::string generator;
  std::uint64_t seed = 0;
  // Number of Y coordinates driven by X, where a generator defines it.
  std::optional<Index> dependent_coords_a;
  std::optional<Index> dependent_coords_b;
};

/// Paired (X, Y) observations under conditions A (m rows) and B (n rows).
struct PairedDataset {
  MatrixXd xa, ya, xb, yb;
  DatasetMeta meta;

  Index m() const { return xa.rows(); }
  Index n() const { return xb.rows(); }
  Index p() const { return xa.cols(); }
  Index q() const { return ya.cols(); }
};

/// Throws DimensionMismatch unless X and Y agree on sample counts within a
/// condition and on feature dimensions across conditions; GroupTooSmall if
/// either condition has fewer than `min_group` samples.
void validate_dataset(const PairedDataset& ds, Index min_group = 2);

MatrixXd stack_rows(const MatrixXd& top, const MatrixXd& bottom);

}  // namespace diffassoc
