#ifndef ISOCHRON_ERRORS_HPP
#define ISOCHRON_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace isochron {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionViolated : public Error {
 public:
  explicit PreconditionViolated(const std::string& what) : Error("PreconditionViolated: " + what) {}
};

class DegenerateResultant : public Error {
 public:
  explicit DegenerateResultant(const std::string& what) : Error("DegenerateResultant: " + what) {}
};

class ZeroPolynomial : public Error {
 public:
  explicit ZeroPolynomial(const std::string& what) : Error("ZeroPolynomial: " + what) {}
};

class LengthMismatch : public Error {
 public:
  explicit LengthMismatch(const std::string& what) : Error("LengthMismatch: " + what) {}
};

class NonIsolatedSingularities : public Error {
 public:
  explicit NonIsolatedSingularities(const std::string& what) : Error("NonIsolatedSingularities: " + what) {}
};

class LinearSystem : public Error {
 public:
  explicit LinearSystem(const std::string& what) : Error("LinearSystem: " + what) {}
};

class EmptyCarrier : public Error {
 public:
  explicit EmptyCarrier(const std::string& what) : Error("EmptyCarrier: " + what) {}
};

class CharacteristicDegenerate : public Error {
 public:
  explicit CharacteristicDegenerate(const std::string& what) : Error("CharacteristicDegenerate: " + what) {}
};

class BranchFailure : public Error {
 public:
  explicit BranchFailure(const std::string& what) : Error("BranchFailure: " + what) {}
};

class TrackingLost : public Error {
 public:
  explicit TrackingLost(const std::string& what) : Error("TrackingLost: " + what) {}
};

class BranchJump : public Error {
 public:
  explicit BranchJump(const std::string& what) : Error("BranchJump: " + what) {}
};

class NewtonDivergence : public Error {
 public:
  explicit NewtonDivergence(const std::string& what) : Error("NewtonDivergence: " + what) {}
};

class QuadratureStall : public Error {
 public:
  explicit QuadratureStall(const std::string& what) : Error("QuadratureStall: " + what) {}
};

class BlowupChartFailure : public Error {
 public:
  explicit BlowupChartFailure(const std::string& what) : Error("BlowupChartFailure: " + what) {}
};

class RamificationCollision : public Error {
 public:
  explicit RamificationCollision(const std::string& what) : Error("RamificationCollision: " + what) {}
};

class CaseMismatch : public Error {
 public:
  explicit CaseMismatch(const std::string& what) : Error("CaseMismatch: " + what) {}
};

class HypothesisNotMet : public Error {
 public:
  explicit HypothesisNotMet(const std::string& what) : Error("HypothesisNotMet: " + what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error("ParseError: " + what) {}
};

}  // namespace isochron

#endif  // ISOCHRON_ERRORS_HPP
