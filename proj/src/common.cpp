#include "diffassoc/common.hpp"
#include "diffassoc/kernels.hpp"

namespace diffassoc {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DegenerateData: return "DegenerateData";
    case ErrorKind::BlockMismatch: return "BlockMismatch";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::GroupTooSmall: return "GroupTooSmall";
    case ErrorKind::NonPositiveVariance: return "NonPositiveVariance";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::InvalidRho: return "InvalidRho";
    case ErrorKind::InvalidCaseParameter: return "InvalidCaseParameter";
    case ErrorKind::FactorizationFailure: return "FactorizationFailure";
    case ErrorKind::MalformedInput: return "MalformedInput";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

const char* to_string(KernelKind kind) noexcept {
  return kind == KernelKind::gaussian ? "gaussian" : "linear";
}

}  // namespace diffassoc
