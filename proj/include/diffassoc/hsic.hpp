#pragma once

#include "diffassoc/kernels.hpp"

#include <string>

namespace diffassoc {

namespace detail {

inline void check_same_size(Index a, Index b, const char* where) {
  if (a != b)
    throw Error(ErrorKind::SizeMismatch, std::string(where) + ": kernel sizes differ (" +
                                             std::to_string(a) + " vs " + std::to_string(b) + ")");
}

}  // namespace detail

/// trace(H K_x H H K_y H) / N^2. Both centered matrices are symmetric, so
/// the trace of the product is the sum of their elementwise product.
template <typename Scalar>
Scalar hsic_trace(const KernelMatrix<Scalar>& kx, const KernelMatrix<Scalar>& ky) {
  detail::check_same_size(kx.size(), ky.size(), "hsic_trace");
  const Index n = kx.size();
  if (n < 2) throw Error(ErrorKind::GroupTooSmall, "hsic_trace: need at least 2 samples");
  const auto cx = center_kernel(kx.entries, {n});
  const auto cy = center_kernel(ky.entries, {n});
  return cx.entries.cwiseProduct(cy.entries).sum() / (Scalar(n) * Scalar(n));
}

/// The biased estimator as a sum of three kernel moment terms:
///   (1/N^2) sum_ij Kx_ij Ky_ij + (1/N^4) sum_ij Kx_ij sum_uv Ky_uv
///   - (2/N^3) sum_i (sum_j Kx_ij)(sum_u Ky_iu).
/// Used as an independent route to check hsic_trace.
template <typename Scalar>
Scalar hsic_sums(const KernelMatrix<Scalar>& kx, const KernelMatrix<Scalar>& ky) {
  detail::check_same_size(kx.size(), ky.size(), "hsic_sums");
  const Scalar n = Scalar(kx.size());
  const Scalar pairwise = kx.entries.cwiseProduct(ky.entries).sum();
  const Scalar grand = kx.entries.sum() * ky.entries.sum();
  const Scalar cross = kx.entries.rowwise().sum().dot(ky.entries.rowwise().sum());
  return pairwise / (n * n) + grand / (n * n * n * n) - Scalar(2) * cross / (n * n * n);
}

/// Diagonal-removed estimate sum_{i != j} Kx_ij Ky_ij / (n (n - 1)) over
/// single-group centered kernels.
template <typename Scalar>
Scalar hsic_nodiag(const CenteredKernel<Scalar>& kx, const CenteredKernel<Scalar>& ky, Index n_group) {
  if (n_group < 2) throw Error(ErrorKind::GroupTooSmall, "hsic_nodiag: group needs at least 2 samples");
  detail::check_same_size(kx.size(), ky.size(), "hsic_nodiag");
  detail::check_same_size(kx.size(), n_group, "hsic_nodiag");
  Scalar off_diag(0);
  for (Index j = 0; j < n_group; ++j)
    for (Index i = 0; i < n_group; ++i)
      if (i != j) off_diag += kx.entries(i, j) * ky.entries(i, j);
  return off_diag / (Scalar(n_group) * Scalar(n_group - 1));
}

}  // namespace diffassoc
