#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ecomp {

enum class ErrorCode {
  kNegativeValue,
  kEmptySupport,
  kNonPositiveProbability,
  kProbabilityMismatch,
  kLengthMismatch,
  kInvalidSetting,
  kTooFewBidders,
  kFloorNotInSupport,
  kBadItemIndex,
  kShapeMismatch,
  kEnumerationCapExceeded,
  kNotRegular,
  kInstanceTooLarge,
  kLpNumericalFailure,
  kLpUnbounded,
  kLpMaxIterations,
  kConfigParse,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so the
// CLI can map it onto an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

}  // namespace ecomp
