#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fmmcomm {

enum class ErrorCode {
  InvalidArgument,
  UnsupportedConfiguration,
  RangeError,
  WrongPhase,
  TopologyMismatch,
  SizeLimit,
  ParseError,
  DuplicateKey,
  NoOverlap,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

// Single exception type for every domain failure; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fmmcomm
