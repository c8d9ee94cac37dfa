#pragma once

#include <stdexcept>
#include <string>

namespace tfblur {

enum class ErrorCode {
  kInvalidArgument,
  kFormat,
  kUnsupported,
  kIo,
  kNotAFrame,
};

const char* ErrorCodeName(ErrorCode code);

// Single exception type for library failures; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void Fail(ErrorCode code, const std::string& what);

inline void Require(bool cond, const std::string& what) {
  if (!cond) Fail(ErrorCode::kInvalidArgument, what);
}

}  // namespace tfblur
