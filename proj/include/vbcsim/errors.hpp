#pragma once

#include <stdexcept>
#include <string>

namespace vbcsim {

// Bad experiment or frame parameters (e.g. slot count not a multiple of the
// coherence time).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Caller broke an operation contract (dimension mismatch, empty input, ...).
class ContractViolation : public std::logic_error {
 public:
  explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// Gram matrix numerically singular; carries the pivot-ratio condition
// estimate that triggered the failure.
class RankDeficiencyError : public std::runtime_error {
 public:
  RankDeficiencyError(const std::string& what, double condition_estimate)
      : std::runtime_error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

// A row to be appended lies (numerically) in the span of the previous rows.
class DegeneracyError : public std::runtime_error {
 public:
  explicit DegeneracyError(const std::string& what, int stage = -1)
      : std::runtime_error(what), stage_(stage) {}
  int stage() const { return stage_; }

 private:
  int stage_;
};

// Exhaustive subset enumeration would exceed the configured cap.
class CapExceededError : public std::runtime_error {
 public:
  explicit CapExceededError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace vbcsim
