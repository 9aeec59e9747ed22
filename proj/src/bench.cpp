#include "diffassoc/bench.hpp"

#include "diffassoc/baseline.hpp"
#include "diffassoc/parallel.hpp"
#include "diffassoc/random.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>

namespace diffassoc {

namespace {

// Offset separating the permutation substreams from the data substreams.
constexpr std::uint64_t kPermutationStream = 0x5bd1e995ULL;

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

PowerEstimate estimate_size_power(const SimConfig& cfg, const BenchOptions& options) {
  if (options.replicates < 1) throw Error(ErrorKind::InvalidArgument, "replicates must be >= 1");
  if (!(options.alpha >= 0.0 && options.alpha <= 1.0))
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in [0, 1]");
  validate_config(cfg);

  const auto start = std::chrono::steady_clock::now();
  std::vector<char> reject_new(options.replicates, 0);
  std::vector<char> reject_dcoxs(options.replicates, 0);

  parallel_for(options.replicates, options.threads, [&](std::size_t r) {
    SimConfig rep = cfg;
    rep.seed = Rng::substream(cfg.seed, r).next_u64();
    const PairedDataset ds = generate(rep);
    if (options.methods.new_test) reject_new[r] = run_test(ds).p_omnibus <= options.alpha;
    if (options.methods.dcoxs) {
      const std::uint64_t perm_seed = Rng::substream(cfg.seed ^ kPermutationStream, r).next_u64();
      reject_dcoxs[r] = dcoxs_test(ds, options.dcoxs_perms, perm_seed) <= options.alpha;
    }
  });

  PowerEstimate est;
  est.setting = cfg.setting;
  est.rho = cfg.rho;
  est.replicates = options.replicates;
  est.alpha = options.alpha;
  est.methods = options.methods;
  est.rejections_new = static_cast<std::size_t>(std::count(reject_new.begin(), reject_new.end(), char{1}));
  est.rejections_dcoxs = static_cast<std::size_t>(std::count(reject_dcoxs.begin(), reject_dcoxs.end(), char{1}));
  est.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return est;
}

std::vector<PowerEstimate> power_curve(const SimConfig& cfg, std::span<const double> rho_grid,
                                       const BenchOptions& options) {
  if (rho_grid.empty()) throw Error(ErrorKind::InvalidArgument, "power_curve: empty rho grid");
  // Validate every grid point before spending time on any of them.
  for (double rho : rho_grid) {
    SimConfig point = cfg;
    point.rho = rho;
    validate_config(point);
  }
  std::vector<PowerEstimate> out;
  out.reserve(rho_grid.size());
  for (double rho : rho_grid) {
    SimConfig point = cfg;
    point.rho = rho;
    out.push_back(estimate_size_power(point, options));
  }
  return out;
}

void write_power_csv(std::ostream& out, std::span<const PowerEstimate> rows) {
  out << "setting,rho,method,replicates,rejections,rate,alpha\n";
  for (const auto& row : rows) {
    const auto emit = [&](const char* method, std::size_t rejections, double rate) {
      out << to_string(row.setting) << ',' << format_double(row.rho) << ',' << method << ',' << row.replicates
          << ',' << rejections << ',' << format_double(rate) << ',' << format_double(row.alpha) << '\n';
    };
    if (row.methods.new_test) emit("new", row.rejections_new, row.rate_new());
    if (row.methods.dcoxs) emit("dcoxs", row.rejections_dcoxs, row.rate_dcoxs());
  }
}

std::vector<QqPoint> qq_data(const SimConfig& cfg, std::size_t n_perms, KernelKind kernel, unsigned threads) {
  if (n_perms < 100) throw Error(ErrorKind::InvalidArgument, "qq_data: need at least 100 permutations");
  const PairedDataset ds = generate(cfg);
  const PooledProduct<double> p = pooled_kernels(ds).product(kernel);
  const RelabeledStatistic<double> stat(p);
  const double sd = std::sqrt(permutation_variance(moment_sums(p), p.m, p.n));

  std::vector<double> z(n_perms);
  const std::uint64_t perm_seed = cfg.seed ^ kPermutationStream;
  parallel_for(n_perms, threads, [&](std::size_t r) {
    Rng rng = Rng::substream(perm_seed, r);
    z[r] = stat(rng.subset(p.size(), p.m)) / sd;
  });
  std::sort(z.begin(), z.end());

  std::vector<QqPoint> out(n_perms);
  const double count = static_cast<double>(n_perms);
  for (std::size_t i = 0; i < n_perms; ++i)
    out[i] = {normal_quantile((static_cast<double>(i) + 0.5) / count), z[i]};
  return out;
}

double ks_distance_to_normal(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::InvalidArgument, "ks_distance_to_normal: no values");
  std::sort(values.begin(), values.end());
  const double count = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double f = normal_cdf(values[i]);
    d = std::max({d, static_cast<double>(i + 1) / count - f, f - static_cast<double>(i) / count});
  }
  return d;
}

}  // namespace diffassoc
