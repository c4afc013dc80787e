#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace sdecert {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state or noise vector whose length does not match the model.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A numerical trajectory left the finite floating-point range.
class DivergenceError : public Error {
 public:
  DivergenceError(double time, const std::string& what)
      : Error(what + " (t = " + std::to_string(time) + ")"), time_(time) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// An estimator could not produce a trustworthy value. `remedy()` says what to change.
class EstimatorFailure : public Error {
 public:
  EstimatorFailure(const std::string& what, std::string remedy)
      : Error(what + (remedy.empty() ? "" : ": " + remedy)), remedy_(std::move(remedy)) {}

  const std::string& remedy() const noexcept { return remedy_; }

 private:
  std::string remedy_;
};

inline constexpr const char* kCouplingRemedy = "Choose better coupling algorithm or larger T";

}  // namespace sdecert
