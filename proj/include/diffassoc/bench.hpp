#pragma once

#include "diffassoc/inference.hpp"
#include "diffassoc/simgen.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace diffassoc {

struct MethodSet {
  bool new_test = true;
  bool dcoxs = false;
};

struct BenchOptions {
  std::size_t replicates = 1000;
  double alpha = 0.05;
  MethodSet methods;
  // Relabelings per dCoxS permutation p-value.
  std::size_t dcoxs_perms = 200;
  unsigned threads = 1;
};

struct PowerEstimate {
  Setting setting = Setting::s1_normal;
  double rho = 0.0;
  std::size_t replicates = 0;
  std::size_t rejections_new = 0;
  std::size_t rejections_dcoxs = 0;
  double alpha = 0.05;
  MethodSet methods;
  double wall_time = 0.0;  // seconds; not part of any emitted table

  double rate_new() const { return static_cast<double>(rejections_new) / static_cast<double>(replicates); }
  double rate_dcoxs() const { return static_cast<double>(rejections_dcoxs) / static_cast<double>(replicates); }
};

/// Replicate r simulates from Rng::substream(cfg.seed, r) and the dCoxS
/// permutations of that replicate use a second substream, so counts are
/// independent of the thread count.
PowerEstimate estimate_size_power(const SimConfig& cfg, const BenchOptions& options);

std::vector<PowerEstimate> power_curve(const SimConfig& cfg, std::span<const double> rho_grid,
                                       const BenchOptions& options);

/// One row per (setting, rho, method):
///   setting,rho,method,replicates,rejections,rate,alpha
void write_power_csv(std::ostream& out, std::span<const PowerEstimate> rows);

struct QqPoint {
  double theoretical = 0.0;
  double observed = 0.0;
};

/// Z-scores of `n_perms` random relabelings of one null dataset, sorted and
/// paired with the normal quantiles of (i - 0.5) / n_perms.
std::vector<QqPoint> qq_data(const SimConfig& cfg, std::size_t n_perms, KernelKind kernel, unsigned threads = 1);

/// sup_x |F_n(x) - Phi(x)| for the empirical CDF of `values`.
double ks_distance_to_normal(std::vector<double> values);

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double x);

}  // namespace diffassoc
