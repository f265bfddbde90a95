#pragma once

#include <compare>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace saa {

// ---------------------------------------------------------------------------
// Errors. Exit-code categories match the CLI contract:
//   2 = configuration, 3 = data, 4 = numeric failure.
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  Error(const std::string& msg, int exit_code)
      : std::runtime_error(msg), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg, 2) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(msg, 3) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& msg) : Error(msg, 4) {}
};

class MisalignedDates : public DataError {
 public:
  explicit MisalignedDates(const std::string& msg) : DataError(msg) {}
};

class NonFiniteInput : public DataError {
 public:
  explicit NonFiniteInput(const std::string& msg) : DataError(msg) {}
};

class InsufficientData : public DataError {
 public:
  explicit InsufficientData(const std::string& msg) : DataError(msg) {}
};

class DegenerateInput : public NumericError {
 public:
  explicit DegenerateInput(const std::string& msg) : NumericError(msg) {}
};

class DegenerateRisk : public NumericError {
 public:
  explicit DegenerateRisk(const std::string& msg) : NumericError(msg) {}
};

class SingularDesign : public NumericError {
 public:
  explicit SingularDesign(const std::string& msg) : NumericError(msg) {}
};

// Divergence and other mid-computation non-finite results.
class NumericFailure : public NumericError {
 public:
  explicit NumericFailure(const std::string& msg) : NumericError(msg) {}
};

// ---------------------------------------------------------------------------
// Calendar keys
// ---------------------------------------------------------------------------

struct YearMonth {
  int year = 0;
  int month = 1;  // 1..12

  int index() const { return year * 12 + (month - 1); }
  static YearMonth from_index(int idx) {
    YearMonth ym;
    ym.year = idx / 12;
    ym.month = idx % 12 + 1;
    if (ym.month <= 0) {  // negative idx
      ym.year -= 1;
      ym.month += 12;
    }
    return ym;
  }
  YearMonth next() const { return from_index(index() + 1); }

  auto operator<=>(const YearMonth&) const = default;

  std::string str() const;                        // "YYYY-MM"
  static YearMonth parse(const std::string& s);   // throws MisalignedDates
};

struct Date {
  int year = 0;
  int month = 1;
  int day = 1;

  YearMonth ym() const { return YearMonth{year, month}; }
  auto operator<=>(const Date&) const = default;

  std::string str() const;                      // "YYYY-MM-DD"
  static Date parse(const std::string& s);      // throws MisalignedDates
};

// ---------------------------------------------------------------------------
// Dense row-major matrix. Deliberately minimal; the problems here are small
// (N assets <= ~8, M state variables ~4, daily panels a few thousand rows).
// ---------------------------------------------------------------------------

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double* row(std::size_t i) { return data_.data() + i * cols_; }
  const double* row(std::size_t i) const { return data_.data() + i * cols_; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

}  // namespace saa
