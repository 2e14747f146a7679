#include "aigc/error.hpp"

namespace aigc {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidSeed: return "InvalidSeed";
    case ErrorCode::InvalidKey: return "InvalidKey";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::CorruptFilter: return "CorruptFilter";
    case ErrorCode::BadSignature: return "BadSignature";
    case ErrorCode::DuplicateNonce: return "DuplicateNonce";
    case ErrorCode::UnknownProduct: return "UnknownProduct";
    case ErrorCode::ProductExists: return "ProductExists";
    case ErrorCode::InvalidTransition: return "InvalidTransition";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::CorruptLedger: return "CorruptLedger";
    case ErrorCode::RoleClassMismatch: return "RoleClassMismatch";
    case ErrorCode::WrongRole: return "WrongRole";
    case ErrorCode::UnknownIdentity: return "UnknownIdentity";
    case ErrorCode::SigmaVerifyFailed: return "SigmaVerifyFailed";
    case ErrorCode::WrongStatus: return "WrongStatus";
    case ErrorCode::OwnerSignInvalid: return "OwnerSignInvalid";
    case ErrorCode::NotAuditor: return "NotAuditor";
    case ErrorCode::StaleIndex: return "StaleIndex";
    case ErrorCode::LedgerExists: return "LedgerExists";
  }
  return "Unknown";
}

}  // namespace aigc
