#pragma once

#include <stdexcept>
#include <string>

namespace liesync {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Input to a matrix function (or a config file) is structurally invalid.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Scenario/config file could not be parsed or is inconsistent.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Principal logarithm requested for a matrix with an eigenvalue on the
/// closed negative real axis (or a singular matrix).
class EigenvalueOnNegativeRealAxis : public Error {
public:
  using Error::Error;
};

/// A gain of K = 0 was supplied where a K-th root or 1/K scaling is needed.
class ZeroGain : public Error {
public:
  using Error::Error;
};

/// Element is outside the neighbourhood where exponential coordinates are
/// a valid chart (log undefined or its norm exceeds the chart radius).
class OutsideLogNeighbourhood : public Error {
public:
  using Error::Error;
};

/// Communication graph has a multiple zero Laplacian eigenvalue.
class Disconnected : public Error {
public:
  using Error::Error;
};

/// The distributed control law is undefined for an agent (neighbour-error
/// product has an eigenvalue on the closed negative real axis).
class ControllerUndefined : public Error {
public:
  ControllerUndefined(int agent, int step, const std::string& what)
      : Error(what), agent(agent), step(step) {}
  int agent = -1;
  int step = -1;
};

/// Closed-form settling analysis requested for a non-contractive gain.
class Unstable : public Error {
public:
  using Error::Error;
};

/// A simulated state drifted off its group manifold beyond tolerance.
class LeftGroup : public Error {
public:
  LeftGroup(int step, double residual, const std::string& what)
      : Error(what), step(step), residual(residual) {}
  int step = -1;
  double residual = 0.0;
};

/// Requested measurement is undefined for the given scenario.
class NotApplicable : public Error {
public:
  using Error::Error;
};

/// An iterative numerical kernel (eigenvalue/square-root iteration) failed
/// to converge.  Never silently ignored.
class NumericalFailure : public Error {
public:
  using Error::Error;
};

}  // namespace liesync
