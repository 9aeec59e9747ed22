#pragma once

#include "diffassoc/inference.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace diffassoc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitMalformed = 2;
inline constexpr int kExitDimension = 3;
inline constexpr int kExitDegenerate = 4;

inline constexpr int kReportSchemaVersion = 1;

int exit_code_for(ErrorKind kind) noexcept;

/// Centers every column of the pooled samples and divides by its pooled
/// standard deviation (columns with zero spread are only centered).
void standardize_pooled(MatrixXd& a, MatrixXd& b);

struct PermutationPValues {
  std::size_t reps = 0;
  double gaussian = 1.0;
  double linear = 1.0;
};

nlohmann::ordered_json test_report(const TestResult& result, double alpha,
                                   const std::optional<PermutationPValues>& perm = std::nullopt);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace diffassoc::cli
