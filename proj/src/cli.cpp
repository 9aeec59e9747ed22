#include "diffassoc/cli.hpp"

#include "diffassoc/bench.hpp"
#include "diffassoc/csv.hpp"
#include "diffassoc/parallel.hpp"
#include "diffassoc/simgen.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace diffassoc::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DimensionMismatch:
    case ErrorKind::SizeMismatch:
    case ErrorKind::BlockMismatch:
      return kExitDimension;
    case ErrorKind::DegenerateData:
    case ErrorKind::NonPositiveVariance:
    case ErrorKind::FactorizationFailure:
      return kExitDegenerate;
    default:
      return kExitMalformed;
  }
}

void standardize_pooled(MatrixXd& a, MatrixXd& b) {
  const MatrixXd pooled = stack_rows(a, b);
  const Eigen::RowVectorXd mean = pooled.colwise().mean();
  const Eigen::RowVectorXd sd =
      ((pooled.rowwise() - mean).colwise().squaredNorm() / static_cast<double>(std::max<Index>(1, pooled.rows() - 1)))
          .cwiseSqrt();
  for (MatrixXd* m : {&a, &b}) {
    m->rowwise() -= mean;
    for (Index j = 0; j < m->cols(); ++j)
      if (sd(j) > 0.0) m->col(j) /= sd(j);
  }
}

namespace {

nlohmann::ordered_json group_json(const GroupHsic& g) {
  return {{"trace", g.trace}, {"diag_removed", g.diag_removed}};
}

nlohmann::ordered_json condition_json(const ConditionHsic& c) {
  return {{"gaussian", group_json(c.gaussian)}, {"linear", group_json(c.linear)}};
}

nlohmann::ordered_json kernel_json(const KernelTestResult& k, std::optional<double> perm_p) {
  nlohmann::ordered_json j{{"statistic", k.stat.t_tilde},
                           {"variance", k.stat.variance},
                           {"z", k.stat.z},
                           {"p_value", k.p_value}};
  if (perm_p) j["permutation_p_value"] = *perm_p;
  return j;
}

}  // namespace

nlohmann::ordered_json test_report(const TestResult& r, double alpha, const std::optional<PermutationPValues>& perm) {
  nlohmann::ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["m"] = r.m;
  j["n"] = r.n;
  j["bandwidths"] = {{"x", r.bandwidth_x}, {"y", r.bandwidth_y}};
  j["gaussian"] = kernel_json(r.gaussian, perm ? std::optional(perm->gaussian) : std::nullopt);
  j["linear"] = kernel_json(r.linear, perm ? std::optional(perm->linear) : std::nullopt);
  if (perm) j["permutation_reps"] = perm->reps;
  j["omnibus_p_value"] = r.p_omnibus;
  j["alpha"] = alpha;
  j["decision"] = r.p_omnibus <= alpha ? "reject" : "fail to reject";
  j["hsic"] = {{"A", condition_json(r.hsic_a)}, {"B", condition_json(r.hsic_b)}};
  return j;
}

namespace {

struct TestArgs {
  std::vector<std::string> files;
  double alpha = 0.05;
  std::optional<double> bandwidth_x;
  std::optional<double> bandwidth_y;
  bool standardize = false;
  std::size_t perm = 0;
  std::uint64_t seed = 1;
};

struct SimulateArgs {
  std::string setting;
  double rho = 0.0;
  Index m = 100, n = 100, p = 50, q = 50;
  std::uint64_t seed = 1;
  std::string out_dir;
};

struct BenchArgs {
  std::string setting;
  std::vector<double> rho_grid;
  std::size_t replicates = 1000;
  double alpha = 0.05;
  std::vector<std::string> methods{"new", "dcoxs"};
  std::uint64_t seed = 1;
  unsigned jobs = 0;
  Index m = 100, n = 100, p = 50, q = 50;
  std::size_t dcoxs_perms = 200;
  std::string out;
  std::string manifest;
};

struct QqArgs {
  Index total = 200;
  std::size_t perms = 10000;
  std::string kernel = "gaussian";
  std::uint64_t seed = 1;
  Index p = 50, q = 50;
  std::string out;
  unsigned jobs = 0;
};

Setting require_setting(const std::string& name) {
  const auto s = parse_setting(name);
  if (!s) throw Error(ErrorKind::InvalidArgument, "unknown setting '" + name + "'");
  return *s;
}

// Writes to `path`, or to `fallback` when the path is empty.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorKind::InvalidArgument, path + ": cannot write file");
  write(file);
}

int cmd_test(const TestArgs& args, std::ostream& out) {
  PairedDataset ds;
  MatrixXd* slots[] = {&ds.xa, &ds.ya, &ds.xb, &ds.yb};
  for (std::size_t i = 0; i < 4; ++i) *slots[i] = read_csv_matrix(args.files[i]);

  const auto& f = args.files;
  const auto mismatch = [](const std::string& msg) { throw Error(ErrorKind::DimensionMismatch, msg); };
  if (ds.xa.rows() != ds.ya.rows())
    mismatch(f[0] + " and " + f[1] + " have different row counts (" + std::to_string(ds.xa.rows()) + " vs " +
             std::to_string(ds.ya.rows()) + ")");
  if (ds.xb.rows() != ds.yb.rows())
    mismatch(f[2] + " and " + f[3] + " have different row counts (" + std::to_string(ds.xb.rows()) + " vs " +
             std::to_string(ds.yb.rows()) + ")");
  if (ds.xa.cols() != ds.xb.cols())
    mismatch(f[0] + " and " + f[2] + " have different column counts (" + std::to_string(ds.xa.cols()) + " vs " +
             std::to_string(ds.xb.cols()) + ")");
  if (ds.ya.cols() != ds.yb.cols())
    mismatch(f[1] + " and " + f[3] + " have different column counts (" + std::to_string(ds.ya.cols()) + " vs " +
             std::to_string(ds.yb.cols()) + ")");

  if (args.standardize) {
    standardize_pooled(ds.xa, ds.xb);
    standardize_pooled(ds.ya, ds.yb);
  }

  const TestConfig config{args.bandwidth_x, args.bandwidth_y};
  const TestResult result = run_test(ds, config);

  std::optional<PermutationPValues> perm;
  if (args.perm > 0) {
    const PooledKernels pk = pooled_kernels(ds, config);
    const unsigned threads = resolve_threads(0);
    perm = PermutationPValues{
        args.perm,
        monte_carlo_permutation_pvalue(pk.product(KernelKind::gaussian), args.perm, args.seed, threads),
        monte_carlo_permutation_pvalue(pk.product(KernelKind::linear), args.perm, args.seed, threads)};
  }
  out << test_report(result, args.alpha, perm).dump(2) << '\n';
  return kExitOk;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
  const SimConfig cfg{require_setting(args.setting), args.rho, args.m, args.n, args.p, args.q, args.seed};
  validate_config(cfg);
  const PairedDataset ds = generate(cfg);

  const fs::path dir(args.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::InvalidArgument, args.out_dir + ": cannot create directory");
  write_csv_matrix(dir / "XA.csv", ds.xa);
  write_csv_matrix(dir / "YA.csv", ds.ya);
  write_csv_matrix(dir / "XB.csv", ds.xb);
  write_csv_matrix(dir / "YB.csv", ds.yb);

  nlohmann::ordered_json manifest;
  manifest["schema_version"] = kReportSchemaVersion;
  manifest["setting"] = std::string(to_string(cfg.setting));
  manifest["rho"] = cfg.rho;
  manifest["m"] = cfg.m;
  manifest["n"] = cfg.n;
  manifest["p"] = cfg.p;
  manifest["q"] = cfg.q;
  manifest["seed"] = cfg.seed;
  if (ds.meta.dependent_coords_a && ds.meta.dependent_coords_b)
    manifest["dependent_coordinates"] = {{"YA", *ds.meta.dependent_coords_a}, {"YB", *ds.meta.dependent_coords_b}};
  manifest["files"] = {"XA.csv", "YA.csv", "XB.csv", "YB.csv"};
  std::ofstream mf(dir / "manifest.json", std::ios::binary);
  mf << manifest.dump(2) << '\n';

  out << "wrote " << (dir / "XA.csv").string() << ", YA.csv, XB.csv, YB.csv, manifest.json\n";
  return kExitOk;
}

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  SimConfig cfg{require_setting(args.setting), 0.0, args.m, args.n, args.p, args.q, args.seed};
  if (args.rho_grid.empty()) throw Error(ErrorKind::InvalidArgument, "--rho-grid must not be empty");

  BenchOptions options;
  options.replicates = args.replicates;
  options.alpha = args.alpha;
  options.methods = {false, false};
  for (const auto& m : args.methods) {
    if (m == "new") options.methods.new_test = true;
    else if (m == "dcoxs") options.methods.dcoxs = true;
    else throw Error(ErrorKind::InvalidArgument, "unknown method '" + m + "'");
  }
  options.dcoxs_perms = args.dcoxs_perms;
  options.threads = resolve_threads(args.jobs);

  const auto rows = power_curve(cfg, args.rho_grid, options);
  emit(args.out, out, [&](std::ostream& os) { write_power_csv(os, rows); });

  double total_time = 0.0;
  for (const auto& row : rows) total_time += row.wall_time;
  err << "bench: " << rows.size() << " grid point(s), " << options.threads << " thread(s), "
      << total_time << " s\n";

  if (!args.manifest.empty()) {
    nlohmann::ordered_json manifest;
    manifest["schema_version"] = kReportSchemaVersion;
    manifest["setting"] = args.setting;
    manifest["rho_grid"] = args.rho_grid;
    manifest["replicates"] = args.replicates;
    manifest["alpha"] = args.alpha;
    manifest["methods"] = args.methods;
    manifest["dcoxs_perms"] = args.dcoxs_perms;
    manifest["m"] = args.m;
    manifest["n"] = args.n;
    manifest["p"] = args.p;
    manifest["q"] = args.q;
    manifest["seed"] = args.seed;
    manifest["threads"] = options.threads;
    manifest["wall_time_seconds"] = total_time;
    emit(args.manifest, out, [&](std::ostream& os) { os << manifest.dump(2) << '\n'; });
  }
  return kExitOk;
}

int cmd_qq(const QqArgs& args, std::ostream& out) {
  if (args.total < 4) throw Error(ErrorKind::InvalidArgument, "--n must be at least 4");
  KernelKind kind;
  if (args.kernel == "gaussian") kind = KernelKind::gaussian;
  else if (args.kernel == "linear") kind = KernelKind::linear;
  else throw Error(ErrorKind::InvalidArgument, "unknown kernel '" + args.kernel + "'");

  const Index m = args.total / 2;
  const SimConfig cfg{Setting::s1_normal, 0.0, m, args.total - m, args.p, args.q, args.seed};
  const auto points = qq_data(cfg, args.perms, kind, resolve_threads(args.jobs));
  emit(args.out, out, [&](std::ostream& os) {
    os << "theoretical,observed\n";
    for (const auto& pt : points) os << format_double(pt.theoretical) << ',' << format_double(pt.observed) << '\n';
  });
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kernel-based differential association test between two conditions", "diffassoc"};
  app.require_subcommand(1);

  TestArgs test_args;
  auto* test = app.add_subcommand("test", "Run the two-kernel omnibus test on four CSV matrices");
  test->add_option("files", test_args.files, "XA.csv YA.csv XB.csv YB.csv")->required()->expected(4);
  test->add_option("--alpha", test_args.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  test->add_option("--bandwidth-x", test_args.bandwidth_x, "Gaussian bandwidth for X (default: median heuristic)")
      ->check(CLI::PositiveNumber);
  test->add_option("--bandwidth-y", test_args.bandwidth_y, "Gaussian bandwidth for Y (default: median heuristic)")
      ->check(CLI::PositiveNumber);
  test->add_flag("--standardize", test_args.standardize, "Standardize each pooled column before testing");
  test->add_option("--perm", test_args.perm, "Also report Monte Carlo permutation p-values with this many relabelings");
  test->add_option("--seed", test_args.seed, "Seed for --perm");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Write a simulated paired dataset as CSV files");
  simulate->add_option("--setting", sim_args.setting, "s1-normal|s1-lognormal|s2-case1..s2-case4")->required();
  simulate->add_option("--rho", sim_args.rho, "Effect parameter");
  simulate->add_option("--m", sim_args.m, "Condition A sample count");
  simulate->add_option("--n", sim_args.n, "Condition B sample count");
  simulate->add_option("--p", sim_args.p, "X dimension");
  simulate->add_option("--q", sim_args.q, "Y dimension");
  simulate->add_option("--seed", sim_args.seed, "Random seed");
  simulate->add_option("--out-dir", sim_args.out_dir, "Output directory")->required();

  BenchArgs bench_args;
  auto* bench = app.add_subcommand("bench", "Estimate size/power over a rho grid and emit a CSV table");
  bench->add_option("--setting", bench_args.setting, "Simulation setting")->required();
  bench->add_option("--rho-grid", bench_args.rho_grid, "Comma-separated rho values")->required()->delimiter(',');
  bench->add_option("--replicates", bench_args.replicates, "Simulated datasets per grid point")
      ->check(CLI::PositiveNumber);
  bench->add_option("--alpha", bench_args.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
  bench->add_option("--methods", bench_args.methods, "new,dcoxs")->delimiter(',');
  bench->add_option("--seed", bench_args.seed, "Master seed");
  bench->add_option("--jobs", bench_args.jobs, "Worker threads (0 = auto)");
  bench->add_option("--m", bench_args.m, "Condition A sample count");
  bench->add_option("--n", bench_args.n, "Condition B sample count");
  bench->add_option("--p", bench_args.p, "X dimension");
  bench->add_option("--q", bench_args.q, "Y dimension");
  bench->add_option("--dcoxs-perms", bench_args.dcoxs_perms, "Permutations per dCoxS p-value")
      ->check(CLI::PositiveNumber);
  bench->add_option("--out", bench_args.out, "CSV output path (default: stdout)");
  bench->add_option("--manifest", bench_args.manifest, "Write a JSON run manifest to this path");

  QqArgs qq_args;
  auto* qq = app.add_subcommand("qq", "Emit permutation z-scores against normal quantiles");
  qq->add_option("--n", qq_args.total, "Total pooled sample size N");
  qq->add_option("--perms", qq_args.perms, "Number of relabelings")->check(CLI::Range(std::size_t{100}, std::size_t{100000000}));
  qq->add_option("--kernel", qq_args.kernel, "gaussian|linear");
  qq->add_option("--seed", qq_args.seed, "Random seed");
  qq->add_option("--p", qq_args.p, "X dimension");
  qq->add_option("--q", qq_args.q, "Y dimension");
  qq->add_option("--jobs", qq_args.jobs, "Worker threads (0 = auto)");
  qq->add_option("--out", qq_args.out, "CSV output path (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitMalformed;
  }

  try {
    if (test->parsed()) return cmd_test(test_args, out);
    if (simulate->parsed()) return cmd_simulate(sim_args, out);
    if (bench->parsed()) return cmd_bench(bench_args, out, err);
    if (qq->parsed()) return cmd_qq(qq_args, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitMalformed;
  }
  return kExitMalformed;
}

}  // namespace diffassoc::cli
