#pragma once

#include <stdexcept>
#include <string>

namespace cesaro {

/// Base of every library error. `numeric()` separates numerical/feasibility
/// failures (exit code 3 in the CLI) from input errors (exit code 2).
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, bool numeric = true)
      : std::runtime_error(what), numeric_(numeric) {}
  bool numeric() const noexcept { return numeric_; }

 private:
  bool numeric_;
};

class DesignInfeasible : public Error {
 public:
  DesignInfeasible(const std::string& what, double residual)
      : Error("design infeasible: " + what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class EmptyCandidates : public Error {
 public:
  EmptyCandidates() : Error("candidate set is empty", false) {}
};

class NumericalRankFailure : public Error {
 public:
  explicit NumericalRankFailure(const std::string& what)
      : Error("numerical rank failure: " + what) {}
};

class OutOfInterval : public Error {
 public:
  explicit OutOfInterval(const std::string& what)
      : Error("time outside schedule interval: " + what, false) {}
};

class SpeedTooLow : public Error {
 public:
  explicit SpeedTooLow(const std::string& what) : Error("speed too low: " + what) {}
};

class BasisMismatch : public Error {
 public:
  explicit BasisMismatch(const std::string& what)
      : Error("basis mismatch: " + what, false) {}
};

class WindowExceedsSimulation : public Error {
 public:
  explicit WindowExceedsSimulation(const std::string& what)
      : Error("window exceeds simulation basis: " + what, false) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error("config: " + what, false) {}
};

}  // namespace cesaro
