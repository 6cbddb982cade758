#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace losline {

/// Scenario parameters or config-file keys failed validation.
/// Carries the offending key so CLI diagnostics can name it.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& msg)
      : std::runtime_error(key.empty() ? msg : key + ": " + msg),
        key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

/// An analytic evaluation would exceed its configured combinatorial cap.
/// Callers should fall back to method=simulate.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The detectability radius does not reach the transmitter line
/// (d_star <= d1 + d2), so no transmitter is ever detectable.
class NoDetectableRegion : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace losline
