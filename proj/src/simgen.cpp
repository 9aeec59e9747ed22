#include "diffassoc/simgen.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace diffassoc {

namespace {

constexpr std::array<std::pair<Setting, std::string_view>, 6> kSettingNames{{
    {Setting::s1_normal, "s1-normal"},
    {Setting::s1_lognormal, "s1-lognormal"},
    {Setting::s2_case1, "s2-case1"},
    {Setting::s2_case2, "s2-case2"},
    {Setting::s2_case3, "s2-case3"},
    {Setting::s2_case4, "s2-case4"},
}};

constexpr double kCaseBaseRho = 0.4;
constexpr Index kCase4BaseDependent = 10;

std::string describe(const SimConfig& cfg) {
  return std::string(to_string(cfg.setting)) + " rho=" + std::to_string(cfg.rho);
}

bool is_nonnegative_integer(double x) { return x >= 0.0 && std::floor(x) == x; }

// Splits a joint draw into X (first p columns) and Y (last q columns).
void split_joint(const MatrixXd& joint, Index p, MatrixXd& x, MatrixXd& y) {
  x = joint.leftCols(p);
  y = joint.rightCols(joint.cols() - p);
}

}  // namespace

std::string_view to_string(Setting s) noexcept {
  for (const auto& [setting, name] : kSettingNames)
    if (setting == s) return name;
  return "unknown";
}

std::optional<Setting> parse_setting(std::string_view name) {
  for (const auto& [setting, label] : kSettingNames)
    if (label == name) return setting;
  return std::nullopt;
}

void validate_config(const SimConfig& cfg) {
  if (cfg.m < 2 || cfg.n < 2)
    throw Error(ErrorKind::InvalidArgument, "sample sizes m and n must be at least 2");
  if (cfg.p < 1 || cfg.q < 1) throw Error(ErrorKind::InvalidArgument, "dimensions p and q must be at least 1");
  if (!std::isfinite(cfg.rho)) throw Error(ErrorKind::InvalidRho, "rho must be finite");

  switch (cfg.setting) {
    case Setting::s1_normal:
    case Setting::s1_lognormal:
      if (cfg.p != cfg.q) throw Error(ErrorKind::InvalidArgument, "setting 1 requires p = q");
      if (!(std::abs(cfg.rho) < 1.0)) throw Error(ErrorKind::InvalidRho, "setting 1 requires |rho| < 1");
      break;
    case Setting::s2_case1:
    case Setting::s2_case2:
      if (!(std::abs(kCaseBaseRho + cfg.rho) < 1.0))
        throw Error(ErrorKind::InvalidCaseParameter, "cases 1-2 require |0.4 + rho| < 1");
      break;
    case Setting::s2_case3:
      if (cfg.rho < 0.0) throw Error(ErrorKind::InvalidCaseParameter, "case 3 requires rho >= 0");
      if (cfg.q > cfg.p) throw Error(ErrorKind::InvalidCaseParameter, "case 3 requires q <= p");
      break;
    case Setting::s2_case4:
      if (!is_nonnegative_integer(cfg.rho))
        throw Error(ErrorKind::InvalidCaseParameter, "case 4 requires rho to be a nonnegative integer");
      if (kCase4BaseDependent + static_cast<Index>(cfg.rho) > cfg.q)
        throw Error(ErrorKind::InvalidCaseParameter, "case 4 requires 10 + rho <= q");
      break;
  }
}

MatrixXd ar1_covariance(Index dim, double rho) {
  if (dim < 1) throw Error(ErrorKind::InvalidArgument, "ar1_covariance: dim must be >= 1");
  if (!(std::abs(rho) < 1.0)) throw Error(ErrorKind::InvalidRho, "ar1_covariance: |rho| must be < 1");
  MatrixXd cov(dim, dim);
  for (Index j = 0; j < dim; ++j)
    for (Index i = 0; i < dim; ++i) cov(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
  return cov;
}

MatrixXd mvn_sample(const MatrixXd& cov, Index count, Rng& rng) {
  if (cov.rows() != cov.cols()) throw Error(ErrorKind::SizeMismatch, "mvn_sample: covariance is not square");
  const Eigen::LLT<MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::FactorizationFailure, "mvn_sample: covariance is not positive definite");
  const MatrixXd z = rng.normal_matrix(count, cov.rows());
  return z * llt.matrixL().transpose();
}

MatrixXd mvn_sample(const MatrixXd& cov, Index count, std::uint64_t seed) {
  Rng rng(seed);
  return mvn_sample(cov, count, rng);
}

PairedDataset gen_setting1(const SimConfig& cfg) {
  if (cfg.setting != Setting::s1_normal && cfg.setting != Setting::s1_lognormal)
    throw Error(ErrorKind::InvalidArgument, "gen_setting1: not a setting 1 configuration");
  validate_config(cfg);
  Rng rng(cfg.seed);
  const Index dim = cfg.p + cfg.q;

  PairedDataset ds;
  ds.meta = {describe(cfg), cfg.seed, std::nullopt, std::nullopt};
  MatrixXd joint_a = rng.normal_matrix(cfg.m, dim);
  MatrixXd joint_b = mvn_sample(ar1_covariance(dim, cfg.rho), cfg.n, rng);
  if (cfg.setting == Setting::s1_lognormal) {
    joint_a = joint_a.array().exp().matrix();
    joint_b = joint_b.array().exp().matrix();
  }
  split_joint(joint_a, cfg.p, ds.xa, ds.ya);
  split_joint(joint_b, cfg.p, ds.xb, ds.yb);
  return ds;
}

namespace {

void gen_ar1_pair(const SimConfig& cfg, bool lognormal, Rng& rng, PairedDataset& ds) {
  const Index dim = cfg.p + cfg.q;
  MatrixXd joint_a = mvn_sample(ar1_covariance(dim, kCaseBaseRho), cfg.m, rng);
  MatrixXd joint_b = mvn_sample(ar1_covariance(dim, kCaseBaseRho + cfg.rho), cfg.n, rng);
  if (lognormal) {
    joint_a = joint_a.array().exp().matrix();
    joint_b = joint_b.array().exp().matrix();
  }
  split_joint(joint_a, cfg.p, ds.xa, ds.ya);
  split_joint(joint_b, cfg.p, ds.xb, ds.yb);
}

// Y = sin(frequency * pi * X[:, :q] / 3) with X ~ N(0, I_p).
void gen_sine_group(Index count, Index p, Index q, double frequency, Rng& rng, MatrixXd& x, MatrixXd& y) {
  x = rng.normal_matrix(count, p);
  y = (x.leftCols(q).array() * (frequency * std::numbers::pi / 3.0)).sin().matrix();
}

// X = log|Z| for latent Z ~ N(0, I_p). The first `dependent` Y coordinates
// equal sin(Z_1); the rest are sin of fresh standard normals.
void gen_log_sine_group(Index count, Index p, Index q, Index dependent, Rng& rng, MatrixXd& x, MatrixXd& y) {
  const MatrixXd latent = rng.normal_matrix(count, p);
  const MatrixXd fresh = rng.normal_matrix(count, q);
  x = latent.array().abs().log().matrix();
  y.resize(count, q);
  for (Index j = 0; j < q; ++j)
    y.col(j) = j < dependent ? latent.col(0).array().sin().matrix() : fresh.col(j).array().sin().matrix();
}

}  // namespace

PairedDataset gen_setting2(const SimConfig& cfg) {
  validate_config(cfg);
  Rng rng(cfg.seed);
  PairedDataset ds;
  ds.meta = {describe(cfg), cfg.seed, std::nullopt, std::nullopt};

  switch (cfg.setting) {
    case Setting::s2_case1:
      gen_ar1_pair(cfg, false, rng, ds);
      break;
    case Setting::s2_case2:
      gen_ar1_pair(cfg, true, rng, ds);
      break;
    case Setting::s2_case3:
      gen_sine_group(cfg.m, cfg.p, cfg.q, 2.0, rng, ds.xa, ds.ya);
      gen_sine_group(cfg.n, cfg.p, cfg.q, 2.0 + cfg.rho, rng, ds.xb, ds.yb);
      break;
    case Setting::s2_case4: {
      const Index dependent_b = kCase4BaseDependent + static_cast<Index>(cfg.rho);
      gen_log_sine_group(cfg.m, cfg.p, cfg.q, kCase4BaseDependent, rng, ds.xa, ds.ya);
      gen_log_sine_group(cfg.n, cfg.p, cfg.q, dependent_b, rng, ds.xb, ds.yb);
      ds.meta.dependent_coords_a = kCase4BaseDependent;
      ds.meta.dependent_coords_b = dependent_b;
      break;
    }
    default:
      throw Error(ErrorKind::InvalidArgument, "gen_setting2: not a setting 2 configuration");
  }
  return ds;
}

PairedDataset generate(const SimConfig& cfg) {
  switch (cfg.setting) {
    case Setting::s1_normal:
    case Setting::s1_lognormal:
      return gen_setting1(cfg);
    default:
      return gen_setting2(cfg);
  }
}

}  // namespace diffassoc
