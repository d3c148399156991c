#pragma once

#include <stdexcept>
#include <string>

namespace heis {

// A caller violated an operation's precondition (bad exponent, under-resolved
// radius, malformed config). The CLI maps these to exit code 2.
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

// A computed result broke an invariant the construction is supposed to
// guarantee (sparsity below 1/2, inconsistent quadrature constant, ...).
// The CLI maps these to exit code 3.
class InvariantError : public std::runtime_error {
 public:
  explicit InvariantError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace heis
