#pragma once

#include "diffassoc/hsic.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

namespace diffassoc {

/// Elementwise product of the two block-centered pooled kernels with the
/// diagonal zeroed. Rows 0..m-1 are condition A, rows m..m+n-1 condition B.
template <typename Scalar>
struct PooledProduct {
  Matrix<Scalar> entries;
  Index m = 0;
  Index n = 0;

  Index size() const { return entries.rows(); }
};

template <typename Scalar>
struct MomentSummary {
  Scalar a = 0;  // sum_{i != j} P_ij^2
  Scalar b = 0;  // sum over distinct (i, j, r) of P_ij P_ir
  Scalar c = 0;  // sum over distinct (i, j, r, s) of P_ij P_rs
  Vector<Scalar> rowsums;
  Scalar total = 0;
};

template <typename Scalar>
struct DiffStatResult {
  Scalar t_tilde = 0;
  Scalar variance = 0;
  Scalar z = 0;
};

namespace detail {

inline void check_groups(Index m, Index n, const char* where) {
  if (m < 2 || n < 2)
    throw Error(ErrorKind::GroupTooSmall, std::string(where) + ": each condition needs at least 2 samples (m=" +
                                              std::to_string(m) + ", n=" + std::to_string(n) + ")");
}

}  // namespace detail

template <typename Scalar>
PooledProduct<Scalar> pooled_product_matrix(const CenteredKernel<Scalar>& kx, const CenteredKernel<Scalar>& ky,
                                             Index m, Index n) {
  detail::check_groups(m, n, "pooled_product_matrix");
  const std::vector<Index> expected{m, n};
  if (kx.blocks != expected || ky.blocks != expected)
    throw Error(ErrorKind::BlockMismatch, "pooled_product_matrix: kernels must be centered with blocks [" +
                                              std::to_string(m) + ", " + std::to_string(n) + "]");
  if (kx.size() != m + n || ky.size() != m + n)
    throw Error(ErrorKind::BlockMismatch, "pooled_product_matrix: kernel size differs from m + n");
  PooledProduct<Scalar> p{kx.entries.cwiseProduct(ky.entries), m, n};
  p.entries.diagonal().setZero();
  return p;
}

/// Difference of the within-condition mean off-diagonal products.
template <typename Scalar>
Scalar statistic_tilde(const PooledProduct<Scalar>& p) {
  detail::check_groups(p.m, p.n, "statistic_tilde");
  const Scalar sum_a = p.entries.topLeftCorner(p.m, p.m).sum();
  const Scalar sum_b = p.entries.bottomRightCorner(p.n, p.n).sum();
  return sum_a / (Scalar(p.m) * Scalar(p.m - 1)) - sum_b / (Scalar(p.n) * Scalar(p.n - 1));
}

/// Closed-form distinct-index sums. Because the diagonal of P is zero,
///   B = sum_i r_i^2 - A   and   C = S^2 - 4B - 2A,
/// with r_i the row sums and S their total.
template <typename Scalar>
MomentSummary<Scalar> moment_sums(const PooledProduct<Scalar>& p) {
  MomentSummary<Scalar> ms;
  ms.rowsums = p.entries.rowwise().sum();
  ms.total = ms.rowsums.sum();
  ms.a = p.entries.squaredNorm();
  ms.b = ms.rowsums.squaredNorm() - ms.a;
  ms.c = ms.total * ms.total - Scalar(4) * ms.b - Scalar(2) * ms.a;
  return ms;
}

/// Exact variance of the statistic over uniformly random relabelings of the
/// pooled samples into groups of sizes m and n.
template <typename Scalar>
Scalar permutation_variance(const MomentSummary<Scalar>& ms, Index m, Index n) {
  detail::check_groups(m, n, "permutation_variance");
  const Scalar nn = Scalar(m + n);
  const Scalar d2 = nn * (nn - 1);
  const Scalar d3 = d2 * (nn - 2);
  const Scalar d4 = d3 * (nn - 3);

  const auto group_term = [&](Index size) {
    const Scalar x = Scalar(size);
    const Scalar f1 = x * (x - 1) / d2;
    const Scalar f2 = x * (x - 1) * (x - 2) / d3;
    const Scalar f3 = x * (x - 1) * (x - 2) * (x - 3) / d4;
    const Scalar norm = x * x * (x - 1) * (x - 1);
    return (Scalar(2) * ms.a * f1 + Scalar(4) * ms.b * f2 + ms.c * f3) / norm;
  };

  const Scalar variance = group_term(m) + group_term(n) - Scalar(2) * ms.c / d4;
  if (!(variance > Scalar(1e-14) * std::max(Scalar(1), ms.a)))
    throw Error(ErrorKind::NonPositiveVariance,
                "permutation_variance: variance is not positive (degenerate kernels?)");
  return variance;
}

template <typename Scalar>
DiffStatResult<Scalar> z_score(const PooledProduct<Scalar>& p) {
  DiffStatResult<Scalar> r;
  r.t_tilde = statistic_tilde(p);
  r.variance = permutation_variance(moment_sums(p), p.m, p.n);
  r.z = r.t_tilde / std::sqrt(r.variance);
  return r;
}

/// Evaluates the statistic for an arbitrary relabeling of the fixed pooled
/// entries in O(m^2): with S_A the within-A sum and R_A the sum of A's row
/// sums, the within-B sum is S - 2 R_A + S_A.
template <typename Scalar>
class RelabeledStatistic {
 public:
  explicit RelabeledStatistic(const PooledProduct<Scalar>& p)
      : p_(p), rowsums_(p.entries.rowwise().sum()), total_(rowsums_.sum()) {
    detail::check_groups(p.m, p.n, "RelabeledStatistic");
  }

  /// `group_a` holds m distinct pooled indices assigned to condition A.
  Scalar operator()(std::span<const Index> group_a) const {
    const Index m = p_.m;
    const Index n = p_.n;
    Scalar within_a(0);
    Scalar rows_a(0);
    for (Index i : group_a) {
      rows_a += rowsums_(i);
      for (Index j : group_a) within_a += p_.entries(j, i);
    }
    const Scalar within_b = total_ - Scalar(2) * rows_a + within_a;
    return within_a / (Scalar(m) * Scalar(m - 1)) - within_b / (Scalar(n) * Scalar(n - 1));
  }

  const PooledProduct<Scalar>& pooled() const { return p_; }

 private:
  const PooledProduct<Scalar>& p_;
  Vector<Scalar> rowsums_;
  Scalar total_;
};

}  // namespace diffassoc
