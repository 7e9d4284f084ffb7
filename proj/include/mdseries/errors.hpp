#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace mdseries {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands with mismatched dimensions, degrees or precision levels.
class ShapeError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error("division by a zero expansion") {}
};

class ArgumentError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Raised by LU when a pivot column is exactly zero.  When the failure
/// happens inside a series solve the inverse condition estimate of the
/// leading matrix is attached (NaN when unknown).
class SingularMatrixError : public Error {
 public:
  explicit SingularMatrixError(std::size_t pivot, double rcond = std::nan(""))
      : Error("singular matrix: zero pivot column at index " +
              std::to_string(pivot) +
              (std::isnan(rcond) ? std::string()
                                 : ", inverse condition estimate " +
                                       std::to_string(rcond))),
        pivot_(pivot),
        rcond_(rcond) {}

  std::size_t pivot() const noexcept { return pivot_; }
  double rcond() const noexcept { return rcond_; }

 private:
  std::size_t pivot_;
  double rcond_;
};

class RankDeficientError : public Error {
 public:
  explicit RankDeficientError(std::size_t column, double rcond = std::nan(""))
      : Error("rank deficient matrix: negligible diagonal at column " +
              std::to_string(column)),
        column_(column),
        rcond_(rcond) {}

  std::size_t column() const noexcept { return column_; }
  double rcond() const noexcept { return rcond_; }

 private:
  std::size_t column_;
  double rcond_;
};

/// A job inside a parallel stage failed; carries the job index.
class JobError : public Error {
 public:
  JobError(std::size_t job, const std::string& what)
      : Error("job " + std::to_string(job) + " failed: " + what), job_(job) {}

  std::size_t job() const noexcept { return job_; }

 private:
  std::size_t job_;
};

}  // namespace mdseries
