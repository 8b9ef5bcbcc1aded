/*
 * (C) Copyright 2026 The zcoup authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace zcoup {

enum class ErrorCode {
  InvalidArgument,
  Parse,
  Io,
  Unbalanced,
  EmptyTruncation,
  DomainViolation,
  OracleLimit,
  NotCyclicallyMonotone,
  EmptySupport,
  Internal,
};

/// Library exception. The code survives the C boundary as a status value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCode::InvalidArgument, what);
}

}  // namespace zcoup
