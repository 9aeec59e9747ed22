#include "diffassoc/dataset.hpp"

namespace diffassoc {

void validate_dataset(const PairedDataset& ds, Index min_group) {
  check_samples(ds.xa, "XA");
  check_samples(ds.ya, "YA");
  check_samples(ds.xb, "XB");
  check_samples(ds.yb, "YB");
  const auto fail = [](const std::string& msg) { throw Error(ErrorKind::DimensionMismatch, msg); };
  if (ds.xa.rows() != ds.ya.rows())
    fail("XA has " + std::to_string(ds.xa.rows()) + " rows but YA has " + std::to_string(ds.ya.rows()));
  if (ds.xb.rows() != ds.yb.rows())
    fail("XB has " + std::to_string(ds.xb.rows()) + " rows but YB has " + std::to_string(ds.yb.rows()));
  if (ds.xa.cols() != ds.xb.cols())
    fail("XA has " + std::to_string(ds.xa.cols()) + " columns but XB has " + std::to_string(ds.xb.cols()));
  if (ds.ya.cols() != ds.yb.cols())
    fail("YA has " + std::to_string(ds.ya.cols()) + " columns but YB has " + std::to_string(ds.yb.cols()));
  if (ds.m() < min_group || ds.n() < min_group)
    throw Error(ErrorKind::GroupTooSmall, "each condition needs at least " + std::to_string(min_group) +
                                              " samples (m=" + std::to_string(ds.m()) +
                                              ", n=" + std::to_string(ds.n()) + ")");
}

MatrixXd stack_rows(const MatrixXd& top, const MatrixXd& bottom) {
  MatrixXd out(top.rows() + bottom.rows(), top.cols());
  out << top, bottom;
  return out;
}

}  // namespace diffassoc
