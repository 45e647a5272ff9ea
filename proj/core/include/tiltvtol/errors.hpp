#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tiltvtol {

enum class ErrorCode {
  kSingularThrust,       // |F| below threshold, (T_r, u_r) undefined
  kAntipodalDirection,   // u . u_r (or k . eta) at -1
  kSingularAllocation,   // allocation matrix not invertible (u_3 <= 0)
  kIntegrationFailure,   // plant state left its invariant set
  kInvalidConfig,
  kIo,
  kEmptyLog,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tiltvtol
