#include "diffassoc/baseline.hpp"

#include "diffassoc/kernels.hpp"
#include "diffassoc/parallel.hpp"
#include "diffassoc/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace diffassoc {

namespace {

MatrixXd euclidean_distances(const MatrixXd& data) { return pairwise_sq_distances(data).cwiseSqrt(); }

std::vector<Index> iota_rows(Index count) {
  std::vector<Index> rows(static_cast<std::size_t>(count));
  std::iota(rows.begin(), rows.end(), Index{0});
  return rows;
}

}  // namespace

double dcoxs_score_from_distances(const MatrixXd& dist_x, const MatrixXd& dist_y, std::span<const Index> rows) {
  const std::size_t count = rows.size();
  if (count < 3) throw Error(ErrorKind::GroupTooSmall, "dcoxs_score: need at least 3 samples");
  const double pairs = static_cast<double>(count * (count - 1) / 2);

  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t b = 1; b < count; ++b) {
    for (std::size_t a = 0; a < b; ++a) {
      mean_x += dist_x(rows[a], rows[b]);
      mean_y += dist_y(rows[a], rows[b]);
    }
  }
  mean_x /= pairs;
  mean_y /= pairs;

  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t b = 1; b < count; ++b) {
    for (std::size_t a = 0; a < b; ++a) {
      const double dx = dist_x(rows[a], rows[b]) - mean_x;
      const double dy = dist_y(rows[a], rows[b]) - mean_y;
      sxx += dx * dx;
      syy += dy * dy;
      sxy += dx * dy;
    }
  }
  // Constant up to rounding of the mean.
  const double eps = 1e-24 * pairs;
  if (sxx <= eps * std::max(1.0, mean_x * mean_x) || syy <= eps * std::max(1.0, mean_y * mean_y))
    throw Error(ErrorKind::DegenerateData, "dcoxs_score: distance vector is constant");

  const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0 + 1e-12, 1.0 - 1e-12);
  return std::atanh(r);
}

double dcoxs_score(const MatrixXd& x, const MatrixXd& y) {
  if (x.rows() != y.rows())
    throw Error(ErrorKind::DimensionMismatch, "dcoxs_score: X and Y sample counts differ");
  const auto rows = iota_rows(x.rows());
  return dcoxs_score_from_distances(euclidean_distances(x), euclidean_distances(y), rows);
}

double dcoxs_test(const PairedDataset& ds, std::size_t reps, std::uint64_t seed, unsigned threads) {
  validate_dataset(ds, 3);
  if (reps < 1) throw Error(ErrorKind::InvalidArgument, "dcoxs_test: reps must be >= 1");
  const Index m = ds.m();
  const Index total = ds.m() + ds.n();
  // A pair's distance does not depend on its group, so rescoring a
  // permuted group only reads a different subset of the pooled matrices.
  const MatrixXd dist_x = euclidean_distances(stack_rows(ds.xa, ds.xb));
  const MatrixXd dist_y = euclidean_distances(stack_rows(ds.ya, ds.yb));

  const auto all = iota_rows(total);
  const std::span<const Index> rows_a(all.data(), static_cast<std::size_t>(m));
  const std::span<const Index> rows_b(all.data() + m, static_cast<std::size_t>(total - m));
  const double observed = std::abs(dcoxs_score_from_distances(dist_x, dist_y, rows_a) -
                                   dcoxs_score_from_distances(dist_x, dist_y, rows_b));

  std::vector<char> extreme(reps, 0);
  parallel_for(reps, threads, [&](std::size_t r) {
    Rng rng = Rng::substream(seed, r);
    auto perm = rng.subset(total, total);
    const std::span<const Index> perm_a(perm.data(), static_cast<std::size_t>(m));
    const std::span<const Index> perm_b(perm.data() + m, static_cast<std::size_t>(total - m));
    const double d = dcoxs_score_from_distances(dist_x, dist_y, perm_a) -
                     dcoxs_score_from_distances(dist_x, dist_y, perm_b);
    extreme[r] = std::abs(d) >= observed * (1.0 - 1e-12);
  });
  const auto count = std::count(extreme.begin(), extreme.end(), char{1});
  return (1.0 + static_cast<double>(count)) / (static_cast<double>(reps) + 1.0);
}

}  // namespace diffassoc
