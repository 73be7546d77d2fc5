#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mpnn_lab {

// Raised when a mean aggregation would divide by a zero degree.
class IsolatedNodeError : public std::runtime_error {
 public:
  explicit IsolatedNodeError(std::size_t node)
      : std::runtime_error("node " + std::to_string(node) + " has zero degree"), node_(node) {}
  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

class DegenerateDegreeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedSignalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NonLipschitzKernelError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A bound was requested for a node count below the minimum-N condition.
class ConditionViolatedError : public std::runtime_error {
 public:
  ConditionViolatedError(std::uint64_t n, std::uint64_t required)
      : std::runtime_error("N = " + std::to_string(n) + " is below the required minimum " +
                           std::to_string(required)),
        n_(n),
        required_(required) {}
  std::uint64_t n() const noexcept { return n_; }
  std::uint64_t required() const noexcept { return required_; }

 private:
  std::uint64_t n_;
  std::uint64_t required_;
};

class RepresentativenessError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OutputDimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace mpnn_lab
