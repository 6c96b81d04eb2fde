#pragma once

#include <stdexcept>
#include <string>

namespace mfe {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Incompatible matrix or polynomial-matrix dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Bad or inconsistent configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// No polynomial left-inverse found up to the requested degree.
class NoLeftInverse : public Error {
 public:
  using Error::Error;
};

/// The block-Toeplitz form has an empty left null space at this degree.
class NoAnnihilator : public Error {
 public:
  using Error::Error;
};

/// No candidate regressor map reached full row rank.
class RankDeficientM : public Error {
 public:
  using Error::Error;
};

/// Regressor window is rank deficient; reported with the smallest singular value.
class RankDeficientWindow : public Error {
 public:
  RankDeficientWindow(const std::string& what, double smallest_sv)
      : Error(what), smallest_sv_(smallest_sv) {}
  double smallest_sv() const { return smallest_sv_; }

 private:
  double smallest_sv_ = 0.0;
};

class UnstablePole : public Error {
 public:
  using Error::Error;
};

class InsufficientDegree : public Error {
 public:
  using Error::Error;
};

/// Numerator degree exceeds denominator degree.
class ImproperFilter : public Error {
 public:
  using Error::Error;
};

class UnstableSystem : public Error {
 public:
  using Error::Error;
};

/// Descriptor matrix of the perturbed plant is singular.
class SingularDescriptor : public Error {
 public:
  using Error::Error;
};

/// (I - A^N) is numerically singular; no periodic fixed point.
class SingularPeriodMatrix : public Error {
 public:
  using Error::Error;
};

/// Constraint set has no quadratic-form representation.
class ConversionUnsupported : public Error {
 public:
  using Error::Error;
};

/// A basis signal's derivative or shift leaves the dictionary.
class ClosureIncomplete : public Error {
 public:
  using Error::Error;
};

}  // namespace mfe
