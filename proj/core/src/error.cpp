#include "shellprobe/error.hpp"

namespace shellprobe {

ParseError::ParseError(std::size_t line, const std::string& what)
    : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Io:
      return 1;
    case ErrorKind::Validation:
      return 2;
    case ErrorKind::Numerical:
      return 3;
  }
  return 3;
}

}  // namespace shellprobe
