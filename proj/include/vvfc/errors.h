#ifndef VVFC_ERRORS_H_
#define VVFC_ERRORS_H_

#include <stdexcept>
#include <string>

namespace vvfc {

// Caller passed arguments that violate an operation's preconditions.
class InvalidArgument : public std::invalid_argument {
 public:
  explicit InvalidArgument(const std::string& what) : std::invalid_argument(what) {}
};

// A byte stream (PGM, VVC1, FBC1, matrix text) is malformed or truncated.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Reading or writing a file failed.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vvfc

#endif  // VVFC_ERRORS_H_
