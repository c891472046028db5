#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ltipar {

enum class ErrorKind {
  DimensionMismatch,
  NonFinite,
  InvalidArgument,
  DegreeZero,
  NonConvergence,
  UnpairedComplexRoot,
  SingularSystem,
  DegreeViolation,
  AcausalRule,
  UnstableNormalization,
  SingularStepMatrix,
  EmptyChannelSet,
  ShapeMismatch,
  Parse,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; the kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ltipar
