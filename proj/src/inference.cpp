#include "diffassoc/inference.hpp"

#include "diffassoc/parallel.hpp"
#include "diffassoc/random.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace diffassoc {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidArgument, "normal_quantile: p must be in (0, 1)");

  // Rational approximation (Acklam), then one Halley step against erfc.
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double low = 0.02425;

  double x;
  if (p < low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  const double e = normal_cdf(x) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

double normal_pvalue(double z) {
  if (!std::isfinite(z)) throw Error(ErrorKind::InvalidArgument, "normal_pvalue: z must be finite");
  return std::min(1.0, std::erfc(std::abs(z) / std::numbers::sqrt2));
}

double cauchy_combine(double p_gaussian, double p_linear) {
  for (double p : {p_gaussian, p_linear})
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, "cauchy_combine: p-values must lie in [0, 1]");
  const auto to_cauchy = [](double p) { return std::tan((0.5 - std::min(p, 0.99)) * std::numbers::pi); };
  const double s = 0.5 * to_cauchy(p_gaussian) + 0.5 * to_cauchy(p_linear);
  // For s > 0 the tail atan(1/s)/pi avoids cancellation in 0.5 - atan(s)/pi.
  const double p = s > 0.0 ? std::atan(1.0 / s) / std::numbers::pi : 0.5 - std::atan(s) / std::numbers::pi;
  return std::clamp(p, 0.0, 1.0);
}

PooledProduct<double> PooledKernels::product(KernelKind kind) const {
  const std::vector<Index> blocks{m, n};
  const auto& kx = kind == KernelKind::gaussian ? gaussian_x : linear_x;
  const auto& ky = kind == KernelKind::gaussian ? gaussian_y : linear_y;
  return pooled_product_matrix(center_kernel(kx, blocks), center_kernel(ky, blocks), m, n);
}

PooledKernels pooled_kernels(const PairedDataset& ds, const TestConfig& config) {
  validate_dataset(ds);
  for (const auto& bw : {config.bandwidth_x, config.bandwidth_y})
    if (bw && !(*bw > 0.0 && std::isfinite(*bw)))
      throw Error(ErrorKind::InvalidArgument, "bandwidth must be positive");

  PooledKernels pk;
  pk.m = ds.m();
  pk.n = ds.n();
  const MatrixXd xu = stack_rows(ds.xa, ds.xb);
  const MatrixXd yu = stack_rows(ds.ya, ds.yb);

  const MatrixXd dist_x = pairwise_sq_distances(xu);
  const MatrixXd dist_y = pairwise_sq_distances(yu);
  pk.bandwidth_x = config.bandwidth_x ? *config.bandwidth_x : median_heuristic_bandwidth(dist_x);
  pk.bandwidth_y = config.bandwidth_y ? *config.bandwidth_y : median_heuristic_bandwidth(dist_y);
  pk.gaussian_x = gaussian_kernel_from_distances(dist_x, pk.bandwidth_x);
  pk.gaussian_y = gaussian_kernel_from_distances(dist_y, pk.bandwidth_y);
  pk.linear_x = linear_kernel_matrix(xu);
  pk.linear_y = linear_kernel_matrix(yu);
  return pk;
}

namespace {

GroupHsic group_hsic(const KernelMatrix<double>& kx, const KernelMatrix<double>& ky, Index start, Index size) {
  const KernelMatrix<double> sub_x{kx.entries.block(start, start, size, size), kx.spec};
  const KernelMatrix<double> sub_y{ky.entries.block(start, start, size, size), ky.spec};
  return {hsic_trace(sub_x, sub_y),
          hsic_nodiag(center_kernel(sub_x, {size}), center_kernel(sub_y, {size}), size)};
}

}  // namespace

TestResult run_test(const PairedDataset& ds, const TestConfig& config) {
  const PooledKernels pk = pooled_kernels(ds, config);

  TestResult r;
  r.m = pk.m;
  r.n = pk.n;
  r.bandwidth_x = pk.bandwidth_x;
  r.bandwidth_y = pk.bandwidth_y;
  for (KernelKind kind : {KernelKind::gaussian, KernelKind::linear}) {
    KernelTestResult& kr = kind == KernelKind::gaussian ? r.gaussian : r.linear;
    kr.kind = kind;
    kr.stat = z_score(pk.product(kind));
    kr.p_value = normal_pvalue(kr.stat.z);
  }
  r.p_omnibus = cauchy_combine(r.gaussian.p_value, r.linear.p_value);

  r.hsic_a = {group_hsic(pk.gaussian_x, pk.gaussian_y, 0, pk.m), group_hsic(pk.linear_x, pk.linear_y, 0, pk.m)};
  r.hsic_b = {group_hsic(pk.gaussian_x, pk.gaussian_y, pk.m, pk.n),
              group_hsic(pk.linear_x, pk.linear_y, pk.m, pk.n)};
  return r;
}

double tie_tolerance(const PooledProduct<double>& p) {
  return 1e-10 * std::max(p.entries.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
}

double monte_carlo_permutation_pvalue(const PooledProduct<double>& p, std::size_t reps, std::uint64_t seed,
                                      unsigned threads) {
  if (reps < 1) throw Error(ErrorKind::InvalidArgument, "monte_carlo_permutation_pvalue: reps must be >= 1");
  const RelabeledStatistic<double> stat(p);
  const double observed = std::abs(statistic_tilde(p));
  const double tol = tie_tolerance(p);

  std::vector<char> extreme(reps, 0);
  parallel_for(reps, threads, [&](std::size_t r) {
    Rng rng = Rng::substream(seed, r);
    const auto group_a = rng.subset(p.size(), p.m);
    extreme[r] = std::abs(stat(group_a)) >= observed - tol;
  });
  const auto count = std::count(extreme.begin(), extreme.end(), char{1});
  return (1.0 + static_cast<double>(count)) / (static_cast<double>(reps) + 1.0);
}

namespace {

std::uint64_t binomial(std::uint64_t n, std::uint64_t k, std::uint64_t cap) {
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > cap) return cap + 1;
  }
  return result;
}

}  // namespace

std::vector<double> exact_permutation_distribution(const PooledProduct<double>& p) {
  const Index total = p.size();
  const Index m = p.m;
  const auto count = binomial(static_cast<std::uint64_t>(total), static_cast<std::uint64_t>(m), kMaxExactAssignments);
  if (count > kMaxExactAssignments)
    throw Error(ErrorKind::TooLarge, "exact_permutation_distribution: more than " +
                                         std::to_string(kMaxExactAssignments) + " assignments");

  const RelabeledStatistic<double> stat(p);
  std::vector<double> values;
  values.reserve(count);
  std::vector<Index> group_a(static_cast<std::size_t>(m));
  std::iota(group_a.begin(), group_a.end(), Index{0});
  while (true) {
    values.push_back(stat(group_a));
    // next combination in lexicographic order
    Index i = m - 1;
    while (i >= 0 && group_a[static_cast<std::size_t>(i)] == total - m + i) --i;
    if (i < 0) break;
    ++group_a[static_cast<std::size_t>(i)];
    for (Index j = i + 1; j < m; ++j)
      group_a[static_cast<std::size_t>(j)] = group_a[static_cast<std::size_t>(j - 1)] + 1;
  }
  return values;
}

double exact_permutation_pvalue(const PooledProduct<double>& p) {
  const auto values = exact_permutation_distribution(p);
  const double observed = std::abs(statistic_tilde(p));
  const double tol = tie_tolerance(p);
  const auto count = std::count_if(values.begin(), values.end(),
                                   [&](double t) { return std::abs(t) >= observed - tol; });
  return static_cast<double>(count) / static_cast<double>(values.size());
}

}  // namespace diffassoc
