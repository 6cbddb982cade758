#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "losline/errors.hpp"

namespace losline {

/// How a probability was obtained.
enum class Method { closed_form, quadrature, mc };

inline std::string to_string(Method m) {
  switch (m) {
    case Method::closed_form: return "closed-form";
    case Method::quadrature: return "quadrature";
    case Method::mc: return "mc";
  }
  return "?";
}

struct TruncationDiag {
  int n_max = 0;      // last Poisson term summed
  double tail = 0.0;  // bound on the neglected tail mass
};

/// A probability with provenance. stderr/n_samples are set for Monte-Carlo
/// estimates, truncation for quadrature ones.
struct ProbEstimate {
  double value = 0.0;
  Method method = Method::closed_form;
  std::optional<double> stderr_ = std::nullopt;
  std::optional<std::int64_t> n_samples = std::nullopt;
  std::optional<TruncationDiag> truncation = std::nullopt;

  void check() const {
    if (!(value >= 0.0 && value <= 1.0))
      throw ConfigError("", "probability out of [0,1]: " + std::to_string(value));
    if (stderr_ && !(*stderr_ >= 0.0))
      throw ConfigError("", "negative stderr");
  }
};

}  // namespace losline
