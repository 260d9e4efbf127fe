#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace phsopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class SingularMatrix : public Error {
 public:
  using Error::Error;
};

class NonSymmetric : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DisconnectedGraph : public Error {
 public:
  using Error::Error;
};

class GenerationFailed : public Error {
 public:
  using Error::Error;
};

class InvalidEpsilon : public Error {
 public:
  using Error::Error;
};

class InvalidCertificate : public Error {
 public:
  using Error::Error;
};

class NonQuadraticCost : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Raised when an iterative solve hits its iteration cap. Keeps the last
/// iterate so callers can inspect how far it got.
class MaxIterationsExceeded : public Error {
 public:
  MaxIterationsExceeded(const std::string& what, Eigen::VectorXd last_iterate,
                        double residual_norm)
      : Error(what),
        last_iterate_(std::move(last_iterate)),
        residual_norm_(residual_norm) {}

  const Eigen::VectorXd& last_iterate() const { return last_iterate_; }
  double residual_norm() const { return residual_norm_; }

 private:
  Eigen::VectorXd last_iterate_;
  double residual_norm_;
};

/// A per-agent implicit solve failed inside a distributed step.
class AgentSolveFailed : public MaxIterationsExceeded {
 public:
  AgentSolveFailed(int agent, const MaxIterationsExceeded& cause)
      : MaxIterationsExceeded("agent " + std::to_string(agent) + ": " + cause.what(),
                              cause.last_iterate(), cause.residual_norm()),
        agent_(agent) {}

  int agent() const { return agent_; }

 private:
  int agent_;
};

}  // namespace phsopt
