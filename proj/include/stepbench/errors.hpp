#pragma once

#include <stdexcept>
#include <string>

namespace stepbench {

enum class ErrorKind {
  Structural,          // malformed tableau / inconsistent dimensions
  Evaluation,          // rhs produced a non-finite value
  StepBudget,          // max_steps exceeded
  StepUnderflow,       // step length fell below h_min_factor * interval
  Divergence,          // state became non-finite
  UnknownId,           // problem / controller / parameter-set id not known
  UnsupportedProblem,  // problem exists but cannot be constructed (C5 data)
  EmptyCurve,          // sweep produced no successful runs
  UnbracketedTarget,   // interpolation target outside the curve envelope
  Infeasible,          // tuner objective undefined everywhere
  Io,                  // file read/write failure
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace stepbench
