#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace g2forge {

class G2Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// phi is outside the open positivity cone.
class NotAG2Structure : public G2Error {
 public:
  using G2Error::G2Error;
};

class SingularDecomposition : public G2Error {
 public:
  using G2Error::G2Error;
};

// No finite-difference step produced a Richardson-consistent derivative.
class StepUnderflow : public G2Error {
 public:
  using G2Error::G2Error;
};

class NonFlatCarrier : public G2Error {
 public:
  using G2Error::G2Error;
};

class NonPositiveConformalFactor : public G2Error {
 public:
  using G2Error::G2Error;
};

class PositivityLost : public G2Error {
 public:
  PositivityLost(const std::string& what, std::size_t step)
      : G2Error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

class StabilityBoundViolated : public G2Error {
 public:
  using G2Error::G2Error;
};

class StepRejected : public G2Error {
 public:
  using G2Error::G2Error;
};

class ConfigError : public G2Error {
 public:
  ConfigError(const std::string& key, int line, const std::string& detail)
      : G2Error(format(key, line, detail)), key_(key), line_(line) {}
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  static std::string format(const std::string& key, int line,
                            const std::string& detail) {
    std::string s = "config error at '" + key + "'";
    if (line > 0) s += " (line " + std::to_string(line) + ")";
    return s + ": " + detail;
  }
  std::string key_;
  int line_;
};

}  // namespace g2forge
