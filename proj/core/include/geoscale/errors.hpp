#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geoscale {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Reading or writing a file failed at the OS level.
class IoError : public Error {
public:
  using Error::Error;
};

/// Malformed CSV input. Row and column are 1-based positions in the file.
class ParseError : public Error {
public:
  ParseError(std::size_t row, std::size_t column, const std::string& what)
      : Error("parse error at row " + std::to_string(row) + ", column " +
              std::to_string(column) + ": " + what),
        row_(row), column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t row_;
  std::size_t column_;
};

/// A numerical routine could not produce a meaningful result.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// The metric at a point could not be inverted (singular or indefinite).
class NonInvertibleMetric : public NumericalError {
public:
  NonInvertibleMetric(std::ptrdiff_t point, const std::string& what)
      : NumericalError("metric at point " + std::to_string(point) +
                       " is not invertible: " + what),
        point_(point) {}

  std::ptrdiff_t point() const noexcept { return point_; }

private:
  std::ptrdiff_t point_;
};

/// Every evaluation point failed at a given bandwidth.
class DistortionUndefined : public NumericalError {
public:
  using NumericalError::NumericalError;
};

/// No bandwidth on the grid produced a usable distortion.
class SelectionError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

} // namespace geoscale
