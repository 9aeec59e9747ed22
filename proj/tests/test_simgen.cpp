#include "diffassoc/simgen.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

using namespace diffassoc;

namespace {

ErrorKind kind_of(const SimConfig& cfg) {
  try {
    generate(cfg);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidArgument;
}

MatrixXd sample_covariance(const MatrixXd& x) {
  const MatrixXd c = x.rowwise() - x.colwise().mean();
  return c.transpose() * c / static_cast<double>(x.rows() - 1);
}

}  // namespace

TEST_SUITE("simgen") {

TEST_CASE("ar1_covariance") {
  SUBCASE("dim 1") { CHECK(ar1_covariance(1, 0.7)(0, 0) == 1.0); }
  SUBCASE("dim 3, rho 0.5") {
    MatrixXd expected(3, 3);
    expected << 1, 0.5, 0.25, 0.5, 1, 0.5, 0.25, 0.5, 1;
    CHECK((ar1_covariance(3, 0.5) - expected).cwiseAbs().maxCoeff() < 1e-15);
  }
  SUBCASE("rho 0 is the identity") { CHECK(ar1_covariance(4, 0.0).isIdentity(0.0)); }
  SUBCASE("negative rho alternates") {
    const MatrixXd c = ar1_covariance(4, -0.5);
    CHECK(c(0, 1) == -0.5);
    CHECK(c(0, 2) == 0.25);
    CHECK(c(0, 3) == -0.125);
  }
  SUBCASE("positive definite, Cholesky reconstructs at dim 50") {
    for (double rho : {-0.9, -0.3, 0.0, 0.4, 0.95}) {
      const MatrixXd c = ar1_covariance(50, rho);
      const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(c);
      CHECK(eig.eigenvalues().minCoeff() > 0.0);
      const Eigen::LLT<MatrixXd> llt(c);
      REQUIRE(llt.info() == Eigen::Success);
      const MatrixXd l = llt.matrixL();
      CHECK((l * l.transpose() - c).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("invalid rho") { CHECK_THROWS_AS(ar1_covariance(3, 1.0), Error); }
}

TEST_CASE("mvn_sample") {
  SUBCASE("sample covariance of AR1(0.6) at 50000 draws") {
    const MatrixXd cov = ar1_covariance(4, 0.6);
    const MatrixXd x = mvn_sample(cov, 50000, 11);
    CHECK(x.colwise().mean().cwiseAbs().maxCoeff() < 0.03);
    const MatrixXd s = sample_covariance(x);
    CHECK((s - cov).cwiseAbs().maxCoeff() < 0.03);
  }
  SUBCASE("identity covariance gives uncorrelated unit-variance columns") {
    const MatrixXd x = mvn_sample(MatrixXd::Identity(3, 3), 50000, 12);
    const MatrixXd s = sample_covariance(x);
    CHECK((s - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.03);
  }
  SUBCASE("same seed, same draws") { CHECK(mvn_sample(ar1_covariance(5, 0.3), 10, 3) == mvn_sample(ar1_covariance(5, 0.3), 10, 3)); }
  SUBCASE("indefinite covariance") {
    MatrixXd c(2, 2);
    c << 1, 2, 2, 1;
    try {
      mvn_sample(c, 3, 1);
      FAIL("expected FactorizationFailure");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::FactorizationFailure);
    }
  }
}

TEST_CASE("generators") {
  SUBCASE("shapes and determinism for every setting") {
    for (Setting s : {Setting::s1_normal, Setting::s1_lognormal, Setting::s2_case1, Setting::s2_case2,
                      Setting::s2_case3, Setting::s2_case4}) {
      const SimConfig cfg{s, s == Setting::s2_case4 ? 2.0 : 0.2, 30, 40, 12, 12, 99};
      const PairedDataset a = generate(cfg);
      const PairedDataset b = generate(cfg);
      CHECK(a.m() == 30);
      CHECK(a.n() == 40);
      CHECK(a.p() == 12);
      CHECK(a.q() == 12);
      CHECK(a.yb.rows() == 40);
      CHECK(a.xa == b.xa);
      CHECK(a.ya == b.ya);
      CHECK(a.xb == b.xb);
      CHECK(a.yb == b.yb);
      CHECK(a.xa.allFinite());
      CHECK(a.yb.allFinite());

      SimConfig other = cfg;
      other.seed = 100;
      CHECK(generate(other).xa != a.xa);
    }
  }
  SUBCASE("setting names round-trip") {
    for (Setting s : {Setting::s1_normal, Setting::s1_lognormal, Setting::s2_case1, Setting::s2_case2,
                      Setting::s2_case3, Setting::s2_case4})
      CHECK(parse_setting(to_string(s)) == s);
    CHECK_FALSE(parse_setting("s3").has_value());
  }
  SUBCASE("lognormal entries are positive") {
    const PairedDataset ds = generate({Setting::s1_lognormal, 0.5, 50, 50, 10, 10, 4});
    CHECK(ds.xa.minCoeff() > 0.0);
    CHECK(ds.yb.minCoeff() > 0.0);
    const PairedDataset c2 = generate({Setting::s2_case2, 0.3, 50, 50, 10, 10, 4});
    CHECK(c2.xb.minCoeff() > 0.0);
  }
  SUBCASE("setting 1 condition B has AR1 cross-correlation") {
    const PairedDataset ds = generate({Setting::s1_normal, 0.6, 20000, 20000, 3, 3, 5});
    // last X coordinate and first Y coordinate are adjacent in the joint vector
    const double r = (ds.xb.col(2).array() * ds.yb.col(0).array()).mean();
    CHECK(std::abs(r - 0.6) < 0.03);
    const double r_a = (ds.xa.col(2).array() * ds.ya.col(0).array()).mean();
    CHECK(std::abs(r_a) < 0.03);
  }
  SUBCASE("rho 0 gives identical distributions in setting 1") {
    const PairedDataset ds = generate({Setting::s1_normal, 0.0, 20000, 20000, 2, 2, 6});
    CHECK(std::abs(ds.xa.mean() - ds.xb.mean()) < 0.03);
    CHECK(std::abs(ds.xa.array().square().mean() - ds.xb.array().square().mean()) < 0.05);
  }
  SUBCASE("case 3 outputs bounded sines of X") {
    const PairedDataset ds = generate({Setting::s2_case3, 1.0, 40, 40, 6, 4, 7});
    CHECK(ds.ya.cwiseAbs().maxCoeff() <= 1.0);
    CHECK(ds.yb.cwiseAbs().maxCoeff() <= 1.0);
    CHECK(std::abs(ds.ya(3, 1) - std::sin(2.0 * std::numbers::pi * ds.xa(3, 1) / 3.0)) < 1e-14);
    CHECK(std::abs(ds.yb(5, 2) - std::sin(3.0 * std::numbers::pi * ds.xb(5, 2) / 3.0)) < 1e-14);
  }
  SUBCASE("case 4 dependent coordinates") {
    const PairedDataset ds = generate({Setting::s2_case4, 2.0, 30, 30, 5, 20, 8});
    REQUIRE(ds.meta.dependent_coords_a.has_value());
    CHECK(*ds.meta.dependent_coords_a == 10);
    CHECK(*ds.meta.dependent_coords_b == 12);
    CHECK(ds.ya.col(0) == ds.ya.col(9));
    CHECK(ds.ya.col(0) != ds.ya.col(10));
    CHECK(ds.yb.col(0) == ds.yb.col(11));
    CHECK(ds.yb.col(0) != ds.yb.col(12));
    CHECK(ds.ya.cwiseAbs().maxCoeff() <= 1.0);
  }
  SUBCASE("invalid configurations") {
    CHECK(kind_of({Setting::s2_case1, 0.7, 10, 10, 5, 5, 1}) == ErrorKind::InvalidCaseParameter);
    CHECK(kind_of({Setting::s2_case2, -1.5, 10, 10, 5, 5, 1}) == ErrorKind::InvalidCaseParameter);
    CHECK(kind_of({Setting::s1_normal, 1.0, 10, 10, 5, 5, 1}) == ErrorKind::InvalidRho);
    CHECK(kind_of({Setting::s1_normal, 0.1, 10, 10, 5, 6, 1}) == ErrorKind::InvalidArgument);
    CHECK(kind_of({Setting::s2_case3, -0.5, 10, 10, 5, 5, 1}) == ErrorKind::InvalidCaseParameter);
    CHECK(kind_of({Setting::s2_case3, 0.5, 10, 10, 5, 6, 1}) == ErrorKind::InvalidCaseParameter);
    CHECK(kind_of({Setting::s2_case4, 1.5, 10, 10, 5, 20, 1}) == ErrorKind::InvalidCaseParameter);
    CHECK(kind_of({Setting::s2_case4, 3.0, 10, 10, 5, 12, 1}) == ErrorKind::InvalidCaseParameter);
    CHECK(kind_of({Setting::s1_normal, 0.0, 1, 10, 5, 5, 1}) == ErrorKind::InvalidArgument);
  }
}

}  // TEST_SUITE
