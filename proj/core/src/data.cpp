#include "resid_edf/data.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "resid_edf/errors.hpp"

namespace resid_edf {

namespace {

constexpr std::uint64_t kCovariateStream = 1;
constexpr std::uint64_t kErrorStream = 2;
constexpr std::uint64_t kIndicatorStream = 3;

double indicator_probability(const SimDesign& design, double x) {
  return design.constant_propensity ? *design.constant_propensity : propensity(x);
}

}  // namespace

std::string_view law_name(ErrorLaw law) noexcept {
  switch (law) {
    case ErrorLaw::Normal1: return "n01";
    case ErrorLaw::Normal2: return "n02";
    case ErrorLaw::Chisq1Centered: return "chisq1";
    case ErrorLaw::T4: return "t4";
    case ErrorLaw::Laplace: return "laplace";
  }
  return "unknown";
}

ErrorLaw parse_law(std::string_view name) {
  for (ErrorLaw law : {ErrorLaw::Normal1, ErrorLaw::Normal2, ErrorLaw::Chisq1Centered,
                       ErrorLaw::T4, ErrorLaw::Laplace}) {
    if (law_name(law) == name) return law;
  }
  throw InvalidArgument("unknown error law '" + std::string(name) +
                        "' (expected n01, n02, chisq1, t4, laplace)");
}

double law_variance(ErrorLaw law) noexcept {
  return law == ErrorLaw::Normal1 ? 1.0 : 2.0;
}

double regression_truth(double x) noexcept {
  return x * x * x - x * x + x + std::cos(1.5 * std::numbers::pi * x);
}

double propensity(double x) noexcept { return 1.0 / (1.0 + std::exp(-x)); }

double draw_error(ErrorLaw law, RngStream& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  switch (law) {
    case ErrorLaw::Normal1:
      return normal(rng);
    case ErrorLaw::Normal2:
      return std::numbers::sqrt2 * normal(rng);
    case ErrorLaw::Chisq1Centered: {
      const double z = normal(rng);
      return z * z - 1.0;
    }
    case ErrorLaw::T4: {
      const double z = normal(rng);
      double chi2 = 0.0;
      for (int k = 0; k < 4; ++k) {
        const double g = normal(rng);
        chi2 += g * g;
      }
      return z / std::sqrt(chi2 / 4.0);
    }
    case ErrorLaw::Laplace: {
      double u = rng.uniform01();
      while (u == 0.0) u = rng.uniform01();
      return u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 - 2.0 * u);
    }
  }
  throw InvalidArgument("draw_error: unknown law");
}

SimulatedSample generate(const SimDesign& design) {
  if (design.n < 1) throw InvalidArgument("generate: n must be >= 1");
  if (design.constant_propensity &&
      !(*design.constant_propensity >= 0.0 && *design.constant_propensity <= 1.0)) {
    throw InvalidArgument("generate: constant propensity must lie in [0, 1]");
  }
  const RngStream root(design.seed);
  RngStream x_rng = root.split(kCovariateStream);
  RngStream e_rng = root.split(kErrorStream);
  RngStream d_rng = root.split(kIndicatorStream);

  std::vector<double> covariates(design.n);
  std::vector<double> errors(design.n);
  std::vector<std::optional<double>> responses(design.n);
  for (std::size_t j = 0; j < design.n; ++j) covariates[j] = 2.0 * x_rng.uniform01() - 1.0;
  for (std::size_t j = 0; j < design.n; ++j) errors[j] = draw_error(design.error_law, e_rng);
  for (std::size_t j = 0; j < design.n; ++j) {
    const bool observed = d_rng.uniform01() < indicator_probability(design, covariates[j]);
    if (observed) responses[j] = regression_truth(covariates[j]) + errors[j];
  }
  return SimulatedSample{MarSample(1, std::move(covariates), std::move(responses)),
                         std::move(errors)};
}

std::vector<int> regenerate_indicators(const SimDesign& design, std::span<const double> covariates) {
  RngStream d_rng = RngStream(design.seed).split(kIndicatorStream);
  std::vector<int> delta;
  delta.reserve(covariates.size());
  for (double x : covariates) {
    delta.push_back(d_rng.uniform01() < indicator_probability(design, x) ? 1 : 0);
  }
  return delta;
}

}  // namespace resid_edf
