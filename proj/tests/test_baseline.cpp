#include "diffassoc/baseline.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <numeric>
#include <random>

using namespace diffassoc;

TEST_SUITE("baseline") {

TEST_CASE("dcoxs_score") {
  SUBCASE("Y a copy of X") {
    const MatrixXd x = oracle::random_matrix(10, 3, 1);
    CHECK(dcoxs_score(x, x) == doctest::Approx(std::atanh(1.0 - 1e-12)).epsilon(1e-12));
  }
  SUBCASE("three samples by hand") {
    MatrixXd x(3, 1), y(3, 2);
    x << 0, 1, 3;          // distances (0,1)=1, (0,2)=3, (1,2)=2
    y << 0, 0, 1, 1, 0, 4;  // distances sqrt2, 4, sqrt10
    const double dx[] = {1.0, 3.0, 2.0};
    const double dy[] = {std::sqrt(2.0), 4.0, std::sqrt(10.0)};
    const double mx = (dx[0] + dx[1] + dx[2]) / 3.0, my = (dy[0] + dy[1] + dy[2]) / 3.0;
    double sxy = 0, sxx = 0, syy = 0;
    for (int k = 0; k < 3; ++k) {
      sxy += (dx[k] - mx) * (dy[k] - my);
      sxx += (dx[k] - mx) * (dx[k] - mx);
      syy += (dy[k] - my) * (dy[k] - my);
    }
    CHECK(std::abs(dcoxs_score(x, y) - std::atanh(sxy / std::sqrt(sxx * syy))) < 1e-12);
  }
  SUBCASE("independent samples are weakly correlated") {
    int small = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const double z = dcoxs_score(oracle::random_matrix(100, 3, 10 + seed), oracle::random_matrix(100, 3, 500 + seed));
      small += std::abs(std::tanh(z)) < 0.3;
    }
    CHECK(small >= 95);
  }
  SUBCASE("constant distances are degenerate") {
    MatrixXd x(3, 2);
    x << 0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2.0;  // equilateral triangle
    MatrixXd y = oracle::random_matrix(3, 2, 4);
    try {
      dcoxs_score(x, y);
      FAIL("expected DegenerateData");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DegenerateData);
    }
  }
  SUBCASE("joint row permutation, translation and scaling invariance") {
    const MatrixXd x = oracle::random_matrix(15, 4, 20);
    const MatrixXd y = oracle::random_matrix(15, 2, 21) + x.leftCols(2);
    const double base = dcoxs_score(x, y);

    std::vector<Index> order(15);
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), std::mt19937_64(9));
    MatrixXd px(15, 4), py(15, 2);
    for (Index i = 0; i < 15; ++i) {
      px.row(i) = x.row(order[static_cast<std::size_t>(i)]);
      py.row(i) = y.row(order[static_cast<std::size_t>(i)]);
    }
    CHECK(dcoxs_score(px, py) == doctest::Approx(base).epsilon(1e-10));

    MatrixXd shifted = x;
    shifted.rowwise() += Eigen::RowVector4d(1, -2, 3, 0.5);
    CHECK(dcoxs_score(shifted, y) == doctest::Approx(base).epsilon(1e-9));
    CHECK(dcoxs_score(MatrixXd(2.5 * x), y) == doctest::Approx(base).epsilon(1e-10));
  }
}

TEST_CASE("dcoxs_test") {
  SUBCASE("p-values lie in [1/(reps+1), 1] and are deterministic") {
    PairedDataset ds{oracle::random_matrix(20, 3, 1), oracle::random_matrix(20, 3, 2),
                     oracle::random_matrix(25, 3, 3), oracle::random_matrix(25, 3, 4), {}};
    const double p = dcoxs_test(ds, 99, 7);
    CHECK(p >= 1.0 / 100.0);
    CHECK(p <= 1.0);
    CHECK(p == dcoxs_test(ds, 99, 7, 3));
  }
  SUBCASE("shuffled copy of condition A behaves like a null") {
    // Condition B is a row-shuffled copy of A: the observed difference is
    // zero, so every relabeling is at least as extreme.
    const MatrixXd x = oracle::random_matrix(20, 3, 5);
    const MatrixXd y = oracle::random_matrix(20, 2, 6);
    std::vector<Index> order(20);
    std::iota(order.begin(), order.end(), Index{0});
    std::shuffle(order.begin(), order.end(), std::mt19937_64(2));
    MatrixXd xb(20, 3), yb(20, 2);
    for (Index i = 0; i < 20; ++i) {
      xb.row(i) = x.row(order[static_cast<std::size_t>(i)]);
      yb.row(i) = y.row(order[static_cast<std::size_t>(i)]);
    }
    const PairedDataset ds{x, y, xb, yb, {}};
    CHECK(dcoxs_test(ds, 50, 1) > 0.9);
  }
  SUBCASE("null p-values are roughly uniform") {
    int rejections = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      PairedDataset ds{oracle::random_matrix(20, 3, 10 * seed + 1), oracle::random_matrix(20, 3, 10 * seed + 2),
                       oracle::random_matrix(20, 3, 10 * seed + 3), oracle::random_matrix(20, 3, 10 * seed + 4), {}};
      rejections += dcoxs_test(ds, 99, seed) <= 0.2;
    }
    CHECK(rejections >= 8);  // binomial(100, 0.2): mean 20, sd 4
    CHECK(rejections <= 32);
  }
  SUBCASE("too few samples") {
    PairedDataset ds{oracle::random_matrix(2, 3, 1), oracle::random_matrix(2, 3, 2),
                     oracle::random_matrix(5, 3, 3), oracle::random_matrix(5, 3, 4), {}};
    CHECK_THROWS_AS(dcoxs_test(ds, 10, 1), Error);
  }
}

}  // TEST_SUITE
