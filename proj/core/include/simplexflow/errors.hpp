#pragma once

#include <stdexcept>
#include <string>

namespace simplexflow {

// Two failure classes: bad inputs (malformed matrices, schema violations)
// and numeric conditions hit during otherwise valid computations. The CLI
// maps them to distinct exit codes.
enum class ErrorCategory { Input, Numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& msg)
      : std::runtime_error(msg), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

struct InputError : Error {
  explicit InputError(const std::string& msg) : Error(ErrorCategory::Input, msg) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& msg) : Error(ErrorCategory::Numeric, msg) {}
};

struct NegativeOffDiagonalError : InputError {
  NegativeOffDiagonalError(int i, int j)
      : InputError("negative off-diagonal entry at (" + std::to_string(i) + "," +
                   std::to_string(j) + ")"),
        row(i), col(j) {}
  int row, col;
};

struct RowSumViolationError : InputError {
  RowSumViolationError(int i, double sum)
      : InputError("row " + std::to_string(i) + " sums to " + std::to_string(sum)),
        row(i) {}
  int row;
};

struct NotIrreducibleError : NumericError {
  NotIrreducibleError() : NumericError("rate matrix is not irreducible") {}
};

struct SingularSystemError : NumericError {
  explicit SingularSystemError(const std::string& msg) : NumericError(msg) {}
};

struct BoundaryPointError : InputError {
  explicit BoundaryPointError(const std::string& msg = "point has a zero coordinate")
      : InputError(msg) {}
};

struct DomainViolationError : InputError {
  explicit DomainViolationError(const std::string& msg) : InputError(msg) {}
};

struct DegenerateDenominatorError : NumericError {
  explicit DegenerateDenominatorError(const std::string& msg) : NumericError(msg) {}
};

struct RowOverflowError : NumericError {
  RowOverflowError(int i, double sum)
      : NumericError("comparison row " + std::to_string(i) + " sums to " +
                     std::to_string(sum) + " > 1"),
        row(i) {}
  int row;
};

struct AsymmetricMatrixError : InputError {
  explicit AsymmetricMatrixError(const std::string& msg) : InputError(msg) {}
};

struct StepsizeUnderflowError : NumericError {
  explicit StepsizeUnderflowError(double t)
      : NumericError("step size underflow at t = " + std::to_string(t)) {}
};

struct NotAnEquilibriumError : NumericError {
  explicit NotAnEquilibriumError(double residual)
      : NumericError("point is not an equilibrium (residual " + std::to_string(residual) + ")") {}
};

struct NotReversibleError : NumericError {
  NotReversibleError() : NumericError("rate matrix is not reversible for the given measure") {}
};

struct EquilibriaNotHyperbolicError : NumericError {
  explicit EquilibriaNotHyperbolicError(const std::string& msg) : NumericError(msg) {}
};

struct EpsilonTooLargeError : InputError {
  explicit EpsilonTooLargeError(const std::string& msg) : InputError(msg) {}
};

struct DegenerateKernelRowError : NumericError {
  explicit DegenerateKernelRowError(int i)
      : NumericError("kernel row " + std::to_string(i) + " is degenerate"), row(i) {}
  int row;
};

struct SchemaError : InputError {
  explicit SchemaError(const std::string& path, const std::string& msg)
      : InputError("schema error at " + path + ": " + msg) {}
};

struct DimensionMismatchError : InputError {
  explicit DimensionMismatchError(const std::string& msg) : InputError(msg) {}
};

struct UnknownKindError : InputError {
  explicit UnknownKindError(const std::string& tag)
      : InputError("unknown kind tag \"" + tag + "\""), tag(tag) {}
  std::string tag;
};

}  // namespace simplexflow
