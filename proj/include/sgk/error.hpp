#pragma once
#include <stdexcept>
#include <string>

namespace sgk {

enum class ErrorCode {
  DecorationMismatch,
  MissingVertex,
  ColorMismatch,
  InvalidSkeleton,
  Syntax,
  DuplicateId,
  ArcMultiplicity,
  Nonplanar,
  EdgePartition,
  PartialDecoration,
  InvalidTriangulation,
  Nonorientable,
  InvalidSubComplex,
  NotReducing,
  NotClean,
  Budget,
  Io,
  Usage,
};

const char* error_code_name(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg, int line = 0, int column = 0)
      : std::runtime_error(msg), code_(code), line_(line), column_(column) {}
  ErrorCode code() const { return code_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  ErrorCode code_;
  int line_;
  int column_;
};

}  // namespace sgk
