#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nsmooth {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The pair of points does not admit a unique minimal geodesic within tolerance.
class CutLocusAmbiguity : public Error {
 public:
  using Error::Error;
};

/// A radius or point violates the domain where an operation is defined.
class DomainViolation : public Error {
 public:
  using Error::Error;
};

class UnsupportedDim : public Error {
 public:
  using Error::Error;
};

/// More than half of the sampled points were rejected as non-differentiable.
class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

/// The image of the sampling ball leaves the convex ball around F(p).
class TargetBallViolation : public Error {
 public:
  using Error::Error;
};

class CoverageFailure : public Error {
 public:
  using Error::Error;
};

class UnsupportedTarget : public Error {
 public:
  using Error::Error;
};

/// The smoothed map leaves the tubular neighbourhood of the embedded target.
class TubeEscape : public Error {
 public:
  TubeEscape(const std::string& what, std::vector<double> point) : Error(what), point_(std::move(point)) {}
  /// Coordinates of the offending source point.
  const std::vector<double>& point() const noexcept { return point_; }

 private:
  std::vector<double> point_;
};

/// A Reeb-scenario hypothesis check failed; step() is 1..4.
class HypothesisFailure : public Error {
 public:
  HypothesisFailure(int step, const std::string& what) : Error(what), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

}  // namespace nsmooth
