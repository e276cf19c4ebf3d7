#ifndef BNPCC_ERROR_HPP
#define BNPCC_ERROR_HPP

#include <stdexcept>
#include <string>

namespace bnpcc {

// Bad user input: malformed files, out-of-range configuration, wrong column
// names. The CLI maps this to exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Raised when a Gaussian copula is evaluated at |rho| = 1.
class SingularCorrelationError : public std::domain_error {
 public:
  explicit SingularCorrelationError(const std::string& what) : std::domain_error(what) {}
};

// Sampler state violated one of its structural invariants.
class ConsistencyError : public std::logic_error {
 public:
  explicit ConsistencyError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace bnpcc

#endif  // BNPCC_ERROR_HPP
