#pragma once

// Synthetic MAR regression samples: Y = r(X) + eps, X ~ U(-1, 1), response
// observed with logistic probability pi(X).

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "resid_edf/rng.hpp"
#include "resid_edf/sample.hpp"

namespace resid_edf {

enum class ErrorLaw {
  Normal1,         // N(0, 1)
  Normal2,         // N(0, 2)
  Chisq1Centered,  // chi^2_1 - 1
  T4,              // Student t with 4 degrees of freedom
  Laplace,         // Laplace(0, b = 1), variance 2
};

/// Short CLI names: n01, n02, chisq1, t4, laplace.
std::string_view law_name(ErrorLaw law) noexcept;
ErrorLaw parse_law(std::string_view name);
double law_variance(ErrorLaw law) noexcept;

/// r(x) = x^3 - x^2 + x + cos(3 pi x / 2)
double regression_truth(double x) noexcept;

/// pi(x) = 1 / (1 + exp(-x))
double propensity(double x) noexcept;

double draw_error(ErrorLaw law, RngStream& rng);

struct SimDesign {
  std::size_t n = 100;
  ErrorLaw error_law = ErrorLaw::Normal1;
  std::uint64_t seed = 0;
  /// Replaces the logistic propensity with a constant (1.0 gives delta = 1).
  std::optional<double> constant_propensity;
};

struct SimulatedSample {
  MarSample sample;
  /// Latent errors for every row, including rows whose response is missing.
  std::vector<double> errors;
};

/// Deterministic given the design. Covariates, errors and indicators come
/// from three separate substreams of the design seed, so the indicators are
/// a function of (seed, X) alone.
SimulatedSample generate(const SimDesign& design);

/// Recomputes the indicators from the design seed and the covariates only.
std::vector<int> regenerate_indicators(const SimDesign& design, std::span<const double> covariates);

}  // namespace resid_edf
