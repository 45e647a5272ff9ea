#include "tiltvtol/errors.hpp"

namespace tiltvtol {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSingularThrust: return "SingularThrust";
    case ErrorCode::kAntipodalDirection: return "AntipodalDirection";
    case ErrorCode::kSingularAllocation: return "SingularAllocation";
    case ErrorCode::kIntegrationFailure: return "IntegrationFailure";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kEmptyLog: return "EmptyLog";
  }
  return "Unknown";
}

}  // namespace tiltvtol
