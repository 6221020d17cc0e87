#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace tpinv {

// Base of every library failure. Kernels running under spectral::block_map
// get the failing block index attached before the error escapes.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message)
      : std::runtime_error(message), message_(message) {}

  const char* what() const noexcept override { return message_.c_str(); }

  void attach_block(std::size_t block) {
    if (block_) return;
    block_ = block;
    message_ = "block " + std::to_string(block) + ": " + message_;
  }
  std::optional<std::size_t> block() const noexcept { return block_; }

 private:
  std::string message_;
  std::optional<std::size_t> block_;
};

// Operand dimensions do not conform.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Input violates a mathematical precondition (non-SPD weight, bad parameter).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Internal consistency or convergence failure.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// File access or text/image format problems.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tpinv
