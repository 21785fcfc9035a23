#include "lle/error.hpp"

namespace lle {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidField: return "invalid-field";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::NoConvergence: return "no-convergence";
    case ErrorKind::SingularJacobian: return "singular-jacobian";
    case ErrorKind::FitQuality: return "fit-quality";
    case ErrorKind::Backend: return "backend";
    case ErrorKind::BlowUp: return "blow-up";
    case ErrorKind::PhaseUndefined: return "phase-undefined";
    case ErrorKind::SteepPhase: return "steep-phase";
    case ErrorKind::NonInvertible: return "non-invertible";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::Extrapolation: return "extrapolation";
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::Fit: return "fit";
    case ErrorKind::MissingArtifact: return "missing-artifact";
  }
  return "unknown";
}

bool is_configuration_error(ErrorKind kind) {
  return kind == ErrorKind::Configuration || kind == ErrorKind::Parameter;
}

}  // namespace lle
