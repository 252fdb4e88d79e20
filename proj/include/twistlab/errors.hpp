#pragma once

#include <stdexcept>
#include <string>

namespace twistlab {

// Every failure mode in the library is a typed exception deriving from Error,
// so callers (and the CLI) can map categories to exit codes without string
// matching.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct AsymmetricInput : Error {
  using Error::Error;
};
struct IndexOutOfRange : Error {
  using Error::Error;
};
struct NotConverged : Error {
  double residual = 0.0;
  NotConverged(const std::string& msg, double r) : Error(msg), residual(r) {}
};
struct IndefiniteDetected : Error {
  using Error::Error;
};
struct SingularMass : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};

struct EmptyGrid : Error {
  using Error::Error;
};
struct DisconnectedGrid : Error {
  using Error::Error;
};
struct BadSpacing : Error {
  using Error::Error;
};
struct NonPositiveGroundState : Error {
  using Error::Error;
};
struct ZeroDistance : Error {
  using Error::Error;
};

struct ZeroBeta : Error {
  using Error::Error;
};
struct EmptyInterval : Error {
  using Error::Error;
};
struct NonPositiveNu : Error {
  using Error::Error;
};
struct NonPositiveChi : Error {
  using Error::Error;
};
struct BadInterval : Error {
  using Error::Error;
};
struct PlanInvalid : Error {
  using Error::Error;
};
struct BranchCutInsideDomain : Error {
  using Error::Error;
};

struct InvalidConfig : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

}  // namespace twistlab
