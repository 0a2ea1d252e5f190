#pragma once

#include <stdexcept>
#include <string>

namespace nlslab {

/// A caller violated an operation's documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A norm or transform is undefined for the given input
/// (e.g. a homogeneous negative-order Sobolev norm with a nonzero DC mode).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An argument falls outside a tabulated or sampled range.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

/// The discretization is too coarse for the requested quantity.
class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical search (bisection, bracketing, parameter scan) gave up.
class SearchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A time integrator produced NaN or overflowed.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlslab
