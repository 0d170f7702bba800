#pragma once

#include <stdexcept>
#include <string>

namespace leosim {

enum class ErrorCode {
  kInvalidArgument,
  kUnreachable,
  kConfig,
  kIo,
};

// Every failure raised by the library is an Error; callers that need to
// distinguish causes switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline Error InvalidArgument(const std::string& what) {
  return Error(ErrorCode::kInvalidArgument, what);
}

}  // namespace leosim
