#ifndef PATHPRICE_ERRORS_HPP
#define PATHPRICE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pathprice {

/// Bad construction parameters or malformed inputs.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// No directed path joins the requested endpoints.
class NoPathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Problem too large for an exhaustive method.
class SizeError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Argument outside a function's mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Broken internal invariant; the run cannot continue.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A search gave up without a result (e.g. no feasible gamma below the cap).
class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pathprice

#endif  // PATHPRICE_ERRORS_HPP
