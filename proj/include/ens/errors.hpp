#pragma once

#include <stdexcept>
#include <string>

namespace ens {

// Requested cutoffs cannot hold the state or operator to the declared tolerance.
struct TruncationError : std::runtime_error {
  explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

// A closed-form evaluation lost too many digits to cancellation.
struct PrecisionError : std::runtime_error {
  explicit PrecisionError(const std::string& what) : std::runtime_error(what) {}
};

// Work refused because it exceeds the dense-matrix policy.
struct ResourceError : std::runtime_error {
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ens
