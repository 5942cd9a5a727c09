#pragma once

#include <stdexcept>
#include <string>

namespace specest {

/// Input outside an operation's domain (bad arguments, malformed files,
/// evaluation at a pole, infeasible constraints).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed: a bracket that theory promises could not be
/// located, a quadrature did not converge, an eigensolve broke down.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Moment-to-measure inversion rejected its input. The stage tells the caller
/// which check fired so it can decide whether to merge clusters and retry.
class InversionError : public NumericalError {
 public:
  enum class Stage {
    hankel_not_positive_definite,
    complex_root,
    nonpositive_root,
    nonpositive_weight,
    atoms_not_separated,
    newton_divergence,
  };

  InversionError(Stage stage, const std::string& what)
      : NumericalError(std::string(stage_name(stage)) + ": " + what),
        stage_(stage) {}

  Stage stage() const noexcept { return stage_; }

  static const char* stage_name(Stage s) noexcept {
    switch (s) {
      case Stage::hankel_not_positive_definite: return "hankel-not-positive-definite";
      case Stage::complex_root: return "complex-root";
      case Stage::nonpositive_root: return "nonpositive-root";
      case Stage::nonpositive_weight: return "nonpositive-weight";
      case Stage::atoms_not_separated: return "atoms-not-separated";
      case Stage::newton_divergence: return "newton-divergence";
    }
    return "unknown";
  }

 private:
  Stage stage_;
};

/// Terminal failure of an end-to-end estimation run, raised after every
/// configured fallback has been exhausted.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace specest
