#pragma once

#include <stdexcept>
#include <string>

namespace lle {

enum class ErrorKind {
  InvalidField,
  Parameter,
  Precondition,
  NoConvergence,
  SingularJacobian,
  FitQuality,
  Backend,
  BlowUp,
  PhaseUndefined,
  SteepPhase,
  NonInvertible,
  Resolution,
  Extrapolation,
  Configuration,
  Fit,
  MissingArtifact,
};

const char* to_string(ErrorKind kind);

/// Configuration-type errors map to CLI exit code 2, everything else to 3.
bool is_configuration_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) throw Error(kind, message);
}

}  // namespace lle
