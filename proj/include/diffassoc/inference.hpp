#pragma once

#include "diffassoc/dataset.hpp"
#include "diffassoc/diffstat.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace diffassoc {

double normal_cdf(double x);

/// Inverse standard normal CDF for p in (0, 1).
double normal_quantile(double p);

/// Two-sided p-value 2 (1 - Phi(|z|)).
double normal_pvalue(double z);

/// Equal-weight Cauchy combination of the Gaussian- and linear-kernel
/// p-values. Each input is clamped to at most 0.99, mapped to
/// tan((0.5 - p) pi), averaged, and the average is read off the standard
/// Cauchy upper tail.
double cauchy_combine(double p_gaussian, double p_linear);

struct TestConfig {
  std::optional<double> bandwidth_x;
  std::optional<double> bandwidth_y;
};

struct KernelTestResult {
  KernelKind kind = KernelKind::gaussian;
  DiffStatResult<double> stat;
  double p_value = 1.0;
};

/// Per-condition HSIC under one kernel: the biased trace form and the
/// diagonal-removed form entering the test statistic.
struct GroupHsic {
  double trace = 0.0;
  double diag_removed = 0.0;
};

struct ConditionHsic {
  GroupHsic gaussian;
  GroupHsic linear;
};

struct TestResult {
  Index m = 0;
  Index n = 0;
  double bandwidth_x = 0.0;
  double bandwidth_y = 0.0;
  KernelTestResult gaussian;
  KernelTestResult linear;
  double p_omnibus = 1.0;
  ConditionHsic hsic_a;
  ConditionHsic hsic_b;

  double z_gaussian() const { return gaussian.stat.z; }
  double z_linear() const { return linear.stat.z; }
  double p_gaussian() const { return gaussian.p_value; }
  double p_linear() const { return linear.p_value; }
};

/// Pooled Gram matrices of one dataset, shared by the test, the Monte Carlo
/// references and the Q-Q harness.
struct PooledKernels {
  Index m = 0;
  Index n = 0;
  double bandwidth_x = 0.0;
  double bandwidth_y = 0.0;
  KernelMatrix<double> gaussian_x, gaussian_y, linear_x, linear_y;

  PooledProduct<double> product(KernelKind kind) const;
};

/// Pools the two conditions (A first) and builds both kernels on X and Y.
/// Gaussian bandwidths default to the median heuristic on the pooled
/// samples, shared across conditions.
PooledKernels pooled_kernels(const PairedDataset& ds, const TestConfig& config = {});

/// Gaussian and linear kernel z-scores, normal p-values and their Cauchy
/// combination, plus per-condition HSIC values.
TestResult run_test(const PairedDataset& ds, const TestConfig& config = {});

/// Add-one Monte Carlo permutation p-value over the fixed pooled entries.
/// Replicate r draws its relabeling from Rng::substream(seed, r), so the
/// result does not depend on `threads`.
double monte_carlo_permutation_pvalue(const PooledProduct<double>& p, std::size_t reps, std::uint64_t seed,
                                      unsigned threads = 1);

inline constexpr std::uint64_t kMaxExactAssignments = 200000;

/// Statistic for every m-subset of {0..N-1} taken as condition A, in
/// lexicographic subset order. Throws TooLarge beyond kMaxExactAssignments.
std::vector<double> exact_permutation_distribution(const PooledProduct<double>& p);

/// Fraction of all relabelings whose |statistic| reaches the observed one.
double exact_permutation_pvalue(const PooledProduct<double>& p);

/// Tolerance used when comparing a permuted |statistic| against the
/// observed one, absorbing summation-order rounding.
double tie_tolerance(const PooledProduct<double>& p);

}  // namespace diffassoc
