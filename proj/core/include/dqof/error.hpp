#pragma once

#include <stdexcept>
#include <string>

namespace dqof {

/// Sizes of two objects that must agree do not (assignment vs problem,
/// state vs diagonal, parameter arity vs block count).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configured size limit was exceeded (brute-force variable cap,
/// simulator qubit cap, memory guard).
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text: problem files, datasets, model files, configs.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dqof
