#pragma once

#include <stdexcept>
#include <string>

namespace bgev {

/// Raised when an argument lies outside the mathematical domain of an operation
/// (non-finite input, probability outside (0, 1), non-positive scale, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised for unusable data: degenerate samples, malformed tables, rank-deficient
/// designs. The CLI maps this to exit code 1.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_domain(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

inline void require_data(bool ok, const std::string& what) {
  if (!ok) throw DataError(what);
}

}  // namespace detail
}  // namespace bgev
