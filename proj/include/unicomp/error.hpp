#pragma once

#include <stdexcept>
#include <string>

namespace unicomp {

enum class ErrorCode {
  InvalidArgument = 1,
  Parse,
  Io,
  DimensionMismatch,
  NonFinite,
  RankDeficient,
  NumericalFailure,
  DegeneratePattern,
  NotRank1Consistent,
  ZeroEntry,
  Underdetermined,
  SignInconsistent,
  Separation,
  DegenerateBracket,
  CollinearDesign,
};

/// Stable kebab-case name, used in diagnostics and JSON output.
const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& what);

}  // namespace unicomp
