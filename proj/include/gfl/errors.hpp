#ifndef GFL_ERRORS_HPP
#define GFL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace gfl {

// Invalid or inconsistent run parameters. The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// A mathematical precondition is violated, e.g. a shift that closes the gap.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

// Caller passed objects that do not belong together.
class UsageError : public std::logic_error {
 public:
  explicit UsageError(const std::string& what) : std::logic_error(what) {}
};

// Solver failure, nonconvergence, or an unsafe truncation under --strict.
// The CLI maps this to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gfl

#endif  // GFL_ERRORS_HPP
