#ifndef RVLAB_ERRORS_HPP
#define RVLAB_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rvlab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A tail function returned a non-finite value or left [0,1].
class ModelEvaluationError : public Error {
public:
  ModelEvaluationError(const std::string& what, double x)
      : Error(what + " (at x=" + std::to_string(x) + ")"), x_(x) {}
  double x() const noexcept { return x_; }

private:
  double x_;
};

/// Adaptive quadrature ran out of its subdivision budget. Carries the best
/// estimate reached so far.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double best, double err)
      : Error(what), best_(best), err_(err) {}
  double best_estimate() const noexcept { return best_; }
  double error_estimate() const noexcept { return err_; }

private:
  double best_;
  double err_;
};

/// V computed through the integration-by-parts identity came out negative
/// beyond the quadrature error bound.
class InconsistencyError : public Error {
public:
  using Error::Error;
};

/// The beta-moment of the model is finite over the analysis range, so the
/// model cannot be analysed at this beta.
class AdmissionError : public Error {
public:
  using Error::Error;
};

class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class ValidationError : public Error {
public:
  ValidationError(const std::string& what, std::vector<std::size_t> rows = {})
      : Error(what), rows_(std::move(rows)) {}
  const std::vector<std::size_t>& rows() const noexcept { return rows_; }

private:
  std::vector<std::size_t> rows_;
};

class InsufficientDataError : public Error {
public:
  using Error::Error;
};

class IndeterminateError : public Error {
public:
  using Error::Error;
};

}  // namespace rvlab

#endif  // RVLAB_ERRORS_HPP
