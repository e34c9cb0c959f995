#pragma once

#include <stdexcept>
#include <string>

namespace bds {

struct SimulationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A model returned a negative or non-finite rate.
struct ModelViolationError : SimulationError {
  using SimulationError::SimulationError;
};

// A model exceeded its own declared dominating bound (detected in verify mode).
struct DominationViolationError : SimulationError {
  using SimulationError::SimulationError;
};

// A skeleton record carries a mark above its stored dominating rate.
struct CorruptedSkeletonError : SimulationError {
  using SimulationError::SimulationError;
};

struct EnumerationCapError : SimulationError {
  using SimulationError::SimulationError;
};

// The frozen swap chain has more than one closed communicating class, so the
// stationary distribution is not unique.
struct UniquenessFailureError : SimulationError {
  using SimulationError::SimulationError;
};

struct StrongOrderViolationError : SimulationError {
  StrongOrderViolationError(const std::string& what, std::string counterexample)
      : SimulationError(what), counterexample(std::move(counterexample)) {}
  std::string counterexample;
};

struct DominationPreconditionError : SimulationError {
  using SimulationError::SimulationError;
};

}  // namespace bds
