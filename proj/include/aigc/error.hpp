#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aigc {

enum class ErrorCode {
  InvalidSeed,
  InvalidKey,
  InvalidParams,
  CorruptFilter,
  BadSignature,
  DuplicateNonce,
  UnknownProduct,
  ProductExists,
  InvalidTransition,
  NotFound,
  IoError,
  CorruptLedger,
  RoleClassMismatch,
  WrongRole,
  UnknownIdentity,
  SigmaVerifyFailed,
  WrongStatus,
  OwnerSignInvalid,
  NotAuditor,
  StaleIndex,
  LedgerExists,
};

std::string_view error_name(ErrorCode code) noexcept;

// Domain error. what() is "<Name>: <detail>"; name() is the bare error name
// the CLI prints.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_name(code)) +
                           (detail.empty() ? "" : ": " + detail)),
        code_(code) {}
  explicit Error(ErrorCode code) : Error(code, {}) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return error_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace aigc
