#include "diffassoc/inference.hpp"
#include "diffassoc/simgen.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numeric>
#include <random>

using namespace diffassoc;

namespace {

// erfc(x) = 1 - erf(x) with erf from its Maclaurin series in long double.
long double erfc_series(long double x) {
  long double term = x, sum = x;
  for (int k = 1; k < 200; ++k) {
    term *= -x * x / k;
    sum += term / (2 * k + 1);
  }
  return 1.0L - 2.0L / std::sqrt(3.14159265358979323846264338327950288L) * sum;
}

long double cauchy_reference(long double pg, long double pl) {
  const long double pi = 3.14159265358979323846264338327950288L;
  const long double s = 0.5L * std::tan((0.5L - std::min(pg, 0.99L)) * pi) +
                        0.5L * std::tan((0.5L - std::min(pl, 0.99L)) * pi);
  return 0.5L - std::atan(s) / pi;
}

PairedDataset null_dataset(Index m, Index n, std::uint64_t seed) {
  return {oracle::random_matrix(m, 3, seed), oracle::random_matrix(m, 2, seed + 1),
          oracle::random_matrix(n, 3, seed + 2), oracle::random_matrix(n, 2, seed + 3), {}};
}

PooledProduct<double> random_pooled(Index m, Index n, std::uint64_t seed) {
  return {oracle::random_hollow_symmetric(m + n, seed), m, n};
}

}  // namespace

TEST_SUITE("inference") {

TEST_CASE("normal_pvalue") {
  CHECK(normal_pvalue(0.0) == 1.0);
  CHECK(normal_pvalue(1.959964) == doctest::Approx(0.05).epsilon(1e-5));
  CHECK(std::abs(normal_pvalue(1.959964) - 0.05) < 1e-6);
  const double ref = static_cast<double>(erfc_series(3.5L / std::sqrt(2.0L)));
  CHECK(oracle::rel_close(normal_pvalue(3.5), ref, 1e-12));
  CHECK(normal_pvalue(-3.5) == normal_pvalue(3.5));
  CHECK_THROWS_AS(normal_pvalue(std::numeric_limits<double>::infinity()), Error);
}

TEST_CASE("normal_quantile inverts normal_cdf") {
  for (double p : {1e-9, 1e-4, 0.01, 0.02425, 0.1, 0.3, 0.5, 0.77, 0.975, 0.999, 1 - 1e-7}) {
    const double x = normal_quantile(p);
    CHECK(oracle::rel_close(normal_cdf(x), p, 1e-9));
  }
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
}

TEST_CASE("cauchy_combine") {
  SUBCASE("p = 0.5 maps to 0") { CHECK(cauchy_combine(0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-15)); }
  SUBCASE("fixed point") {
    for (double p = 0.01; p <= 0.99 + 1e-12; p += 0.01)
      CHECK(std::abs(cauchy_combine(p, p) - p) < 1e-12);
  }
  SUBCASE("extended precision reference") {
    CHECK(std::abs(cauchy_combine(0.01, 0.8) - static_cast<double>(cauchy_reference(0.01L, 0.8L))) < 1e-12);
  }
  SUBCASE("clamp at 0.99") {
    CHECK(std::abs(cauchy_combine(1.0, 1.0) - 0.99) < 1e-12);
    CHECK(cauchy_combine(1.0, 0.3) == cauchy_combine(0.99, 0.3));
  }
  SUBCASE("symmetry and monotonicity") {
    for (double a = 0.05; a < 0.99; a += 0.07) {
      double prev = 0.0;
      for (double b = 0.01; b <= 0.99; b += 0.02) {
        const double c = cauchy_combine(a, b);
        CHECK(c == cauchy_combine(b, a));
        CHECK(c >= prev);
        prev = c;
      }
    }
  }
  SUBCASE("extreme inputs stay in [0, 1]") {
    const double c = cauchy_combine(0.0, 0.0);
    CHECK(c >= 0.0);
    CHECK(c < 1e-15);
    CHECK_THROWS_AS(cauchy_combine(-0.1, 0.5), Error);
    CHECK_THROWS_AS(cauchy_combine(0.5, 1.5), Error);
  }
}

TEST_CASE("run_test") {
  SUBCASE("identical conditions give a zero statistic") {
    PairedDataset ds = null_dataset(20, 20, 1);
    ds.xb = ds.xa;
    ds.yb = ds.ya;
    const auto r = run_test(ds);
    CHECK(r.gaussian.stat.t_tilde == 0.0);
    CHECK(r.linear.stat.t_tilde == 0.0);
    CHECK(r.z_gaussian() == 0.0);
    CHECK(r.p_gaussian() == 1.0);
    CHECK(r.p_linear() == 1.0);
    CHECK(std::abs(r.p_omnibus - 0.99) < 1e-12);
  }
  SUBCASE("report fields") {
    const auto ds = null_dataset(15, 18, 10);
    const auto r = run_test(ds);
    CHECK(r.m == 15);
    CHECK(r.n == 18);
    CHECK(r.bandwidth_x > 0.0);
    CHECK(r.bandwidth_y > 0.0);
    CHECK(std::abs(r.p_omnibus - cauchy_combine(r.p_gaussian(), r.p_linear())) == 0.0);
    CHECK(oracle::rel_close(r.hsic_a.gaussian.diag_removed - r.hsic_b.gaussian.diag_removed,
                            r.gaussian.stat.t_tilde, 1e-9));
    CHECK(oracle::rel_close(r.hsic_a.linear.diag_removed - r.hsic_b.linear.diag_removed,
                            r.linear.stat.t_tilde, 1e-9));
    CHECK(r.hsic_a.gaussian.trace >= 0.0);
    CHECK(r.hsic_b.linear.trace >= 0.0);
  }
  SUBCASE("explicit bandwidths are used") {
    const auto ds = null_dataset(10, 10, 20);
    const auto r = run_test(ds, {0.7, 2.5});
    CHECK(r.bandwidth_x == 0.7);
    CHECK(r.bandwidth_y == 2.5);
    CHECK_THROWS_AS(run_test(ds, {-1.0, std::nullopt}), Error);
  }
  SUBCASE("dimension mismatch") {
    auto ds = null_dataset(10, 10, 30);
    ds.xb = oracle::random_matrix(10, 4, 99);
    try {
      run_test(ds);
      FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DimensionMismatch);
    }
    auto short_y = null_dataset(10, 10, 31);
    short_y.ya = oracle::random_matrix(9, 2, 98);
    CHECK_THROWS_AS(run_test(short_y), Error);
  }
  SUBCASE("groups too small") {
    const auto ds = null_dataset(1, 10, 40);
    try {
      run_test(ds);
      FAIL("expected GroupTooSmall");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::GroupTooSmall);
    }
  }
  SUBCASE("invariant under reordering within each condition") {
    const auto ds = null_dataset(12, 14, 50);
    PairedDataset shuffled = ds;
    std::vector<Index> oa(12), ob(14);
    std::iota(oa.begin(), oa.end(), Index{0});
    std::iota(ob.begin(), ob.end(), Index{0});
    std::shuffle(oa.begin(), oa.end(), std::mt19937_64(3));
    std::shuffle(ob.begin(), ob.end(), std::mt19937_64(4));
    for (Index i = 0; i < 12; ++i) {
      shuffled.xa.row(i) = ds.xa.row(oa[static_cast<std::size_t>(i)]);
      shuffled.ya.row(i) = ds.ya.row(oa[static_cast<std::size_t>(i)]);
    }
    for (Index i = 0; i < 14; ++i) {
      shuffled.xb.row(i) = ds.xb.row(ob[static_cast<std::size_t>(i)]);
      shuffled.yb.row(i) = ds.yb.row(ob[static_cast<std::size_t>(i)]);
    }
    const auto a = run_test(ds);
    const auto b = run_test(shuffled);
    const auto near = [](double u, double v) { return std::abs(u - v) <= 1e-10 * std::max(1.0, std::abs(u)); };
    CHECK(near(a.bandwidth_x, b.bandwidth_x));
    CHECK(near(a.gaussian.stat.z, b.gaussian.stat.z));
    CHECK(near(a.linear.stat.z, b.linear.stat.z));
    CHECK(near(a.gaussian.stat.variance, b.gaussian.stat.variance));
    CHECK(near(a.p_omnibus, b.p_omnibus));
    CHECK(near(a.hsic_a.linear.trace, b.hsic_a.linear.trace));
    CHECK(near(a.hsic_b.gaussian.diag_removed, b.hsic_b.gaussian.diag_removed));
  }
}

TEST_CASE("monte_carlo_permutation_pvalue") {
  SUBCASE("all-zero matrix") {
    const PooledProduct<double> zero{MatrixXd::Zero(8, 8), 4, 4};
    CHECK(monte_carlo_permutation_pvalue(zero, 50, 1) == 1.0);
  }
  SUBCASE("observed strictly more extreme than every relabeling") {
    // Strong within-A structure that no other assignment can reproduce.
    PooledProduct<double> p{MatrixXd::Zero(13, 13), 6, 7};
    p.entries.topLeftCorner(6, 6).setConstant(1.0);
    p.entries.diagonal().setZero();
    const std::size_t reps = 200;
    // Only the identity assignment reaches |t_obs| = 1 (a draw hits it with
    // probability 1/1716; seed 5 never does).
    CHECK(monte_carlo_permutation_pvalue(p, reps, 5) == 1.0 / static_cast<double>(reps + 1));
  }
  SUBCASE("deterministic and independent of thread count") {
    const auto p = random_pooled(6, 7, 3);
    const double a = monte_carlo_permutation_pvalue(p, 2000, 42, 1);
    CHECK(a == monte_carlo_permutation_pvalue(p, 2000, 42, 1));
    CHECK(a == monte_carlo_permutation_pvalue(p, 2000, 42, 4));
  }
  SUBCASE("agrees with the exhaustive p-value") {
    const auto p = random_pooled(5, 5, 4);
    CHECK(std::abs(monte_carlo_permutation_pvalue(p, 100000, 7) - exact_permutation_pvalue(p)) < 0.01);
  }
}

TEST_CASE("exact_permutation_distribution") {
  SUBCASE("N = 4, m = 2") {
    const auto values = exact_permutation_distribution(random_pooled(2, 2, 5));
    CHECK(values.size() == 6);
  }
  SUBCASE("moments") {
    const auto p = random_pooled(5, 5, 6);
    const auto values = exact_permutation_distribution(p);
    REQUIRE(values.size() == 252);
    const auto mv = oracle::mean_var(values);
    CHECK(std::abs(mv.mean) <= 1e-10 * p.entries.cwiseAbs().maxCoeff());
    CHECK(oracle::rel_close(mv.var, permutation_variance(moment_sums(p), 5, 5), 1e-8));
    CHECK(values.front() == doctest::Approx(statistic_tilde(p)).epsilon(1e-12));
  }
  SUBCASE("matches the bitmask oracle as a multiset") {
    const auto p = random_pooled(3, 4, 7);
    auto a = exact_permutation_distribution(p);
    auto b = oracle::all_relabelings(p.entries, 3);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-12);
  }
  SUBCASE("guard") {
    const PooledProduct<double> big{MatrixXd::Zero(40, 40), 20, 20};
    try {
      exact_permutation_distribution(big);
      FAIL("expected TooLarge");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::TooLarge);
    }
  }
}

TEST_CASE("Monte Carlo p-value is valid under exhaustive relabeling") {
  // Treat each relabeling of a small pooled matrix as the observed one; the
  // resulting exact p-values must be stochastically no smaller than uniform.
  const auto p = random_pooled(4, 4, 8);
  const auto values = exact_permutation_distribution(p);
  std::vector<double> pvals;
  for (double t : values) {
    const auto count = std::count_if(values.begin(), values.end(),
                                     [&](double u) { return std::abs(u) >= std::abs(t) - 1e-12; });
    pvals.push_back(static_cast<double>(count) / static_cast<double>(values.size()));
  }
  for (double alpha : {0.05, 0.1, 0.25, 0.5}) {
    const auto rejected = std::count_if(pvals.begin(), pvals.end(), [&](double pv) { return pv <= alpha; });
    CHECK(static_cast<double>(rejected) / static_cast<double>(pvals.size()) <= alpha + 1e-12);
  }
}

TEST_CASE("two-sided normal p-values are roughly uniform under a small null") {
  // 200 null datasets at N = 60: the Gaussian-kernel rejection rate at 0.1
  // should be near 0.1 (binomial sd 0.021).
  int rejections = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SimConfig cfg{Setting::s1_normal, 0.0, 30, 30, 5, 5, 900 + seed};
    rejections += run_test(generate(cfg)).p_gaussian() <= 0.1;
  }
  CHECK(rejections >= 8);
  CHECK(rejections <= 36);
}

}  // TEST_SUITE
