#include "ltipar/error.hpp"

namespace ltipar {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::NonFinite: return "non-finite value";
    case ErrorKind::InvalidArgument: return "invalid argument";
    case ErrorKind::DegreeZero: return "degree-zero polynomial";
    case ErrorKind::NonConvergence: return "non-convergence";
    case ErrorKind::UnpairedComplexRoot: return "unpaired complex root";
    case ErrorKind::SingularSystem: return "singular system";
    case ErrorKind::DegreeViolation: return "degree violation";
    case ErrorKind::AcausalRule: return "acausal derivative rule";
    case ErrorKind::UnstableNormalization: return "unstable normalization";
    case ErrorKind::SingularStepMatrix: return "singular step matrix";
    case ErrorKind::EmptyChannelSet: return "empty channel set";
    case ErrorKind::ShapeMismatch: return "shape mismatch";
    case ErrorKind::Parse: return "parse error";
  }
  return "unknown";
}

}  // namespace ltipar
