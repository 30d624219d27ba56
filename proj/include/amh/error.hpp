#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace amh {

/// Bad argument or malformed input object (non-finite matrix, wrong dimension, ...).
class input_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not produce a result (singular factor, failed eigensolve).
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed data file. `line()` is 1-based, 0 when the error is not tied to a line.
class data_error : public std::runtime_error {
 public:
  data_error(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Malformed experiment configuration.
class config_error : public std::runtime_error {
 public:
  config_error(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Failure inside a running chain; carries the iteration that blew up.
class chain_error : public numerical_error {
 public:
  chain_error(const std::string& what, std::size_t iteration)
      : numerical_error("iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}

  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace amh
