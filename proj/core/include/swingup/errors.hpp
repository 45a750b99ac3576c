#pragma once

#include <stdexcept>
#include <string>

namespace swingup {

// Numerical failure during propagation or assembly (step underflow, NaN
// contamination, ...). Distinct from invalid inputs, which raise
// std::invalid_argument.
class NumericsError : public std::runtime_error {
 public:
  explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

// An iterative procedure hit its iteration cap before reaching tolerance.
class ConvergenceError : public NumericsError {
 public:
  explicit ConvergenceError(const std::string& what) : NumericsError(what) {}
};

// Malformed configuration input; carries file/line context when available.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string file = {}, int line = 0)
      : std::runtime_error(format(what, file, line)), file_(std::move(file)), line_(line) {}

  const std::string& file() const { return file_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& what, const std::string& file, int line) {
    if (file.empty()) return what;
    return file + ":" + std::to_string(line) + ": " + what;
  }
  std::string file_;
  int line_ = 0;
};

}  // namespace swingup
