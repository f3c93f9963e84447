#ifndef EMOCORR_ERRORS_HPP
#define EMOCORR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace emocorr {

// Bad or inconsistent input data (malformed files, zero rows, unreachable paths).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed line in a line-oriented input file. what() starts with "line N: ".
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& reason)
      : DataError("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

// Inconsistent settings or dimensions supplied by the caller.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Training loss became non-finite.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t epoch, const std::string& detail)
      : std::runtime_error("training diverged at epoch " + std::to_string(epoch) +
                           ": " + detail),
        epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

// No finite-probability path exists between the requested emotions.
class UnreachableError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace emocorr

#endif  // EMOCORR_ERRORS_HPP
