#pragma once

#include <stdexcept>
#include <string>

namespace adcon {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Distinguishes the individual input-validation failures so callers can
/// react to (or test for) a specific one.
enum class ValidationCode {
  BadNodeCount,
  NodeOutOfRange,
  SelfLoop,
  DuplicateEdge,
  UnknownNode,
  UnknownEdge,
  DimensionMismatch,
  DisconnectedGraph,
  NegativeGain,
  NoPositiveGain,
  NonPositiveLearningRate,
  BadProjectionBounds,
  BadStepSize,
  BadHorizon,
  BadStride,
  BadSignal,
  BadReferenceWeights,
  InconsistentScenario,
  ParseError,
};

class ValidationError : public Error {
 public:
  ValidationError(ValidationCode code, const std::string& what)
      : Error(what), code_(code) {}

  ValidationCode code() const noexcept { return code_; }

 private:
  ValidationCode code_;
};

/// A mathematical hypothesis of an operation is violated (e.g. a certificate
/// requested for a disconnected graph).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Simulation state became non-finite or exceeded the magnitude guard.
class DivergenceError : public Error {
 public:
  DivergenceError(double time, const std::string& what)
      : Error(what), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace adcon
