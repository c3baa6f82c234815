#ifndef GRADPUSH_ERRORS_HPP
#define GRADPUSH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gradpush {

/// Bad user input: malformed config, inconsistent dimensions, invalid flags.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// A run blew past the divergence guard (non-finite or > 1e12 coordinates).
class DivergenceError : public std::runtime_error {
public:
  explicit DivergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative numeric routine failed to converge or broke down.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failure; carries the offending path in the message.
class IoError : public std::runtime_error {
public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gradpush

#endif
