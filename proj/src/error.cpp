#include "unicomp/error.hpp"

namespace unicomp {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Io: return "io";
    case ErrorCode::DimensionMismatch: return "dimension-mismatch";
    case ErrorCode::NonFinite: return "non-finite";
    case ErrorCode::RankDeficient: return "rank-deficient";
    case ErrorCode::NumericalFailure: return "numerical-failure";
    case ErrorCode::DegeneratePattern: return "degenerate-pattern";
    case ErrorCode::NotRank1Consistent: return "not-rank1-consistent";
    case ErrorCode::ZeroEntry: return "zero-entry";
    case ErrorCode::Underdetermined: return "underdetermined";
    case ErrorCode::SignInconsistent: return "sign-inconsistent";
    case ErrorCode::Separation: return "separation";
    case ErrorCode::DegenerateBracket: return "degenerate-bracket";
    case ErrorCode::CollinearDesign: return "collinear-design";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void raise(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace unicomp
