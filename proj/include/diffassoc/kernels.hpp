#pragma once

#include "diffassoc/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace diffassoc {

enum class KernelKind { gaussian, linear };

const char* to_string(KernelKind kind) noexcept;

// An empty bandwidth on a Gaussian spec means "median heuristic".
template <typename Scalar>
struct KernelSpec {
  KernelKind kind = KernelKind::gaussian;
  std::optional<Scalar> bandwidth;
};

template <typename Scalar>
struct KernelMatrix {
  Matrix<Scalar> entries;
  KernelSpec<Scalar> spec;

  Index size() const { return entries.rows(); }
};

template <typename Scalar>
struct CenteredKernel {
  Matrix<Scalar> entries;
  std::vector<Index> blocks;

  Index size() const { return entries.rows(); }
};

/// Squared Euclidean distances between the rows of `data`.
///
/// Uses the expanded form |x|^2 + |y|^2 - 2<x,y> on the lower triangle of
/// the Gram matrix; negatives produced by rounding are clamped to zero and
/// the upper triangle is mirrored so the result is exactly symmetric.
template <typename Derived>
Matrix<typename Derived::Scalar> pairwise_sq_distances(const Eigen::MatrixBase<Derived>& data) {
  using Scalar = typename Derived::Scalar;
  check_samples(data);
  const Index n = data.rows();
  Matrix<Scalar> gram = Matrix<Scalar>::Zero(n, n);
  gram.template selfadjointView<Eigen::Lower>().rankUpdate(data.derived());
  const Vector<Scalar> norms = gram.diagonal();

  Matrix<Scalar> dist2(n, n);
  for (Index j = 0; j < n; ++j) {
    dist2(j, j) = Scalar(0);
    for (Index i = j + 1; i < n; ++i) {
      const Scalar d = std::max(Scalar(0), norms(i) + norms(j) - Scalar(2) * gram(i, j));
      dist2(i, j) = d;
      dist2(j, i) = d;
    }
  }
  return dist2;
}

namespace detail {

template <typename Scalar>
std::vector<Scalar> upper_triangle(const Matrix<Scalar>& m) {
  const Index n = m.rows();
  std::vector<Scalar> out;
  out.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
  for (Index j = 1; j < n; ++j)
    for (Index i = 0; i < j; ++i) out.push_back(m(i, j));
  return out;
}

// Median with the even-count convention of averaging the two central order
// statistics. Reorders `values`.
template <typename Scalar>
Scalar median_inplace(std::vector<Scalar>& values) {
  const std::size_t count = values.size();
  const std::size_t mid = count / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const Scalar upper = values[mid];
  if (count % 2 == 1) return upper;
  const Scalar lower = *std::max_element(values.begin(), values.begin() + mid);
  return (lower + upper) / Scalar(2);
}

}  // namespace detail

/// Median heuristic: sigma = sqrt(median_{i<j} dist2(i,j) / 2).
template <typename Scalar>
Scalar median_heuristic_bandwidth(const Matrix<Scalar>& dist2) {
  if (dist2.rows() != dist2.cols())
    throw Error(ErrorKind::SizeMismatch, "median_heuristic_bandwidth: matrix is not square");
  if (dist2.rows() < 2)
    throw Error(ErrorKind::DegenerateData, "median_heuristic_bandwidth: need at least 2 samples");
  auto values = detail::upper_triangle(dist2);
  const Scalar med = detail::median_inplace(values);
  if (!(med > Scalar(0)))
    throw Error(ErrorKind::DegenerateData,
                "median_heuristic_bandwidth: median pairwise distance is zero");
  return std::sqrt(med / Scalar(2));
}

template <typename Scalar>
KernelMatrix<Scalar> gaussian_kernel_from_distances(const Matrix<Scalar>& dist2, Scalar bandwidth) {
  if (!(bandwidth > Scalar(0)) || !std::isfinite(bandwidth))
    throw Error(ErrorKind::InvalidArgument, "gaussian kernel: bandwidth must be positive");
  const Scalar scale = Scalar(-1) / (Scalar(2) * bandwidth * bandwidth);
  KernelMatrix<Scalar> k{(dist2.array() * scale).exp().matrix(),
                         {KernelKind::gaussian, bandwidth}};
  k.entries.diagonal().setOnes();
  return k;
}

/// Gaussian Gram matrix exp(-|x_i - x_j|^2 / (2 bandwidth^2)). With no
/// bandwidth the median heuristic over the rows of `data` is used.
template <typename Derived>
KernelMatrix<typename Derived::Scalar> gaussian_kernel_matrix(
    const Eigen::MatrixBase<Derived>& data,
    std::optional<typename Derived::Scalar> bandwidth = std::nullopt) {
  const auto dist2 = pairwise_sq_distances(data);
  const auto sigma = bandwidth ? *bandwidth : median_heuristic_bandwidth(dist2);
  return gaussian_kernel_from_distances(dist2, sigma);
}

template <typename Derived>
KernelMatrix<typename Derived::Scalar> linear_kernel_matrix(const Eigen::MatrixBase<Derived>& data) {
  using Scalar = typename Derived::Scalar;
  check_samples(data);
  const Index n = data.rows();
  KernelMatrix<Scalar> k{Matrix<Scalar>::Zero(n, n), {KernelKind::linear, std::nullopt}};
  k.entries.template selfadjointView<Eigen::Lower>().rankUpdate(data.derived());
  for (Index j = 1; j < n; ++j)
    for (Index i = 0; i < j; ++i) k.entries(i, j) = k.entries(j, i);
  return k;
}

namespace detail {

// H_a M H_b for a dense block M: subtract row means and column means, add
// back the grand mean.
template <typename Scalar>
Matrix<Scalar> double_center(const Matrix<Scalar>& block) {
  const Vector<Scalar> row_means = block.rowwise().mean();
  const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> col_means = block.colwise().mean();
  const Scalar grand = row_means.mean();
  Matrix<Scalar> out = block;
  out.colwise() -= row_means;
  out.rowwise() -= col_means;
  out.array() += grand;
  return out;
}

}  // namespace detail

/// Block-diagonal centering H K H with H = diag(H_{b_1}, ..., H_{b_k}).
/// Off-diagonal blocks are centered on both sides by their own block
/// centerers. The lower block triangle is mirrored to keep the output
/// exactly symmetric.
template <typename Scalar>
CenteredKernel<Scalar> center_kernel(const Matrix<Scalar>& k, const std::vector<Index>& blocks) {
  if (k.rows() != k.cols())
    throw Error(ErrorKind::SizeMismatch, "center_kernel: matrix is not square");
  Index total = 0;
  for (Index b : blocks) {
    if (b < 1) throw Error(ErrorKind::BlockMismatch, "center_kernel: empty block");
    total += b;
  }
  if (blocks.empty() || total != k.rows())
    throw Error(ErrorKind::BlockMismatch, "center_kernel: block sizes do not sum to " +
                                              std::to_string(k.rows()));

  CenteredKernel<Scalar> out{Matrix<Scalar>(k.rows(), k.cols()), blocks};
  Index row0 = 0;
  for (std::size_t a = 0; a < blocks.size(); ++a) {
    Index col0 = 0;
    for (std::size_t b = 0; b <= a; ++b) {
      Matrix<Scalar> c = detail::double_center<Scalar>(k.block(row0, col0, blocks[a], blocks[b]));
      if (a == b) {
        out.entries.block(row0, col0, blocks[a], blocks[b]) = (c + c.transpose()) / Scalar(2);
      } else {
        out.entries.block(row0, col0, blocks[a], blocks[b]) = c;
        out.entries.block(col0, row0, blocks[b], blocks[a]) = c.transpose();
      }
      col0 += blocks[b];
    }
    row0 += blocks[a];
  }
  return out;
}

template <typename Scalar>
CenteredKernel<Scalar> center_kernel(const KernelMatrix<Scalar>& k, const std::vector<Index>& blocks) {
  return center_kernel(k.entries, blocks);
}

}  // namespace diffassoc
