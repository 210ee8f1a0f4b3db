#pragma once

#include <stdexcept>
#include <string>

namespace paulilearn {

/// Error taxonomy. Each category maps to a distinct CLI exit code.
enum class ErrorCategory {
  dimension = 2,   // mismatched qubit counts
  capacity = 3,    // dense cap / label capacity exceeded
  domain = 4,      // value outside the mathematical domain of an operation
  invalid_channel = 5,
  fit = 6,
  pool_exhausted = 7,
  config = 8,
  incompatible_query = 9,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory cat, const std::string& msg)
      : std::runtime_error(msg), category_(cat) {}
  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& msg) : Error(ErrorCategory::dimension, msg) {}
};
struct CapacityError : Error {
  explicit CapacityError(const std::string& msg) : Error(ErrorCategory::capacity, msg) {}
};
struct DomainError : Error {
  explicit DomainError(const std::string& msg) : Error(ErrorCategory::domain, msg) {}
};
struct InvalidChannelError : Error {
  explicit InvalidChannelError(const std::string& msg)
      : Error(ErrorCategory::invalid_channel, msg) {}
};
struct FitError : Error {
  explicit FitError(const std::string& msg) : Error(ErrorCategory::fit, msg) {}
};
struct PoolExhaustedError : Error {
  explicit PoolExhaustedError(const std::string& msg)
      : Error(ErrorCategory::pool_exhausted, msg) {}
};
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error(ErrorCategory::config, msg) {}
};
struct IncompatibleQueryError : Error {
  explicit IncompatibleQueryError(const std::string& msg)
      : Error(ErrorCategory::incompatible_query, msg) {}
};

}  // namespace paulilearn
