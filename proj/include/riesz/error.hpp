#pragma once

#include <stdexcept>
#include <string>

namespace riesz {

enum class ErrorKind {
  InvalidArgument,
  UnsupportedKind,
  Singularity,
  CoincidentPoints,
  Divergence,
  NonDifferentiable,
  OptimizationFailed,
  Schema,
};

const char* to_string(ErrorKind kind) noexcept;

/// Library-wide exception; every failure path carries a kind so the CLI can
/// map it to an exit status and a manifest entry.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace riesz
