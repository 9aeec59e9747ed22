#pragma once

#include "diffassoc/dataset.hpp"
#include "diffassoc/random.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace diffassoc {

enum class Setting { s1_normal, s1_lognormal, s2_case1, s2_case2, s2_case3, s2_case4 };

std::string_view to_string(Setting s) noexcept;
std::optional<Setting> parse_setting(std::string_view name);

struct SimConfig {
  Setting setting = Setting::s1_normal;
  double rho = 0.0;
  Index m = 100;
  Index n = 100;
  Index p = 50;
  Index q = 50;
  std::uint64_t seed = 1;
};

/// Throws InvalidRho / InvalidCaseParameter / InvalidArgument when the
/// configuration is outside the generator's valid range.
void validate_config(const SimConfig& cfg);

/// Covariance with entries rho^|i - j|.
MatrixXd ar1_covariance(Index dim, double rho);

/// `count` iid rows from N(0, cov): standard normals times the transposed
/// Cholesky factor.
MatrixXd mvn_sample(const MatrixXd& cov, Index count, Rng& rng);
MatrixXd mvn_sample(const MatrixXd& cov, Index count, std::uint64_t seed);

/// Setting 1: condition A ~ N(0, I), condition B ~ N(0, AR1(rho)) over p + q
/// coordinates, split into X (first p) and Y (last q). The lognormal variant
/// exponentiates every entry.
PairedDataset gen_setting1(const SimConfig& cfg);

/// Setting 2, cases 1-4 (cfg.setting selects the case).
PairedDataset gen_setting2(const SimConfig& cfg);

/// Dispatches on cfg.setting.
PairedDataset generate(const SimConfig& cfg);

}  // namespace diffassoc
