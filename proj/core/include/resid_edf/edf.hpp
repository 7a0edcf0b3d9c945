#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "resid_edf/polybasis.hpp"
#include "resid_edf/sample.hpp"
#include "resid_edf/smoother.hpp"

namespace resid_edf {

/// Right-continuous step function with mass 1/N at each of N jump points.
class EdfEstimate {
 public:
  /// Throws InsufficientData when values is empty.
  static EdfEstimate from_values(std::span<const double> values);

  /// Fraction of jump points <= t.
  [[nodiscard]] double operator()(double t) const noexcept;
  [[nodiscard]] double evaluate(double t) const noexcept { return (*this)(t); }

  [[nodiscard]] std::size_t count() const noexcept { return jumps_.size(); }
  [[nodiscard]] const std::vector<double>& jumps() const noexcept { return jumps_; }
  [[nodiscard]] double mass() const noexcept { return 1.0 / static_cast<double>(jumps_.size()); }

  /// CSV `t,F`: one line per distinct jump point with the value just after it.
  void write_csv(std::ostream& out) const;

 private:
  explicit EdfEstimate(std::vector<double> sorted) : jumps_(std::move(sorted)) {}
  std::vector<double> jumps_;
};

/// Complete-case residual EDF: (1/N) sum_j delta_j 1[Y_j - rhat_c(X_j) <= t].
EdfEstimate edf_complete_case(const MarSample& sample, const SmootherFit& fit);

enum class Imputation {
  /// Every response replaced by the first-stage fit.
  Full,
  /// Observed responses kept, only missing ones imputed.
  Partial,
};

struct TunedOptions {
  Imputation imputation = Imputation::Full;
  SmootherOptions smoother{};
};

/// Residuals of the two-stage imputation smoother: fit on complete cases
/// with c1, impute, refit the completed sample with c2, and take
/// Y_j - rstar(X_j) for the complete cases.
std::vector<IndexedResidual> tuned_residuals(const MarSample& sample, int degree,
                                             const ProductKernel& kernel, double c1, double c2,
                                             DomainBox domain, const TunedOptions& options = {});

EdfEstimate edf_tuned(const MarSample& sample, int degree, const ProductKernel& kernel, double c1,
                      double c2, DomainBox domain, const TunedOptions& options = {});

/// (1/N) sum of squared residuals, no centering. Throws on empty input.
double sigma2_complete_case(std::span<const double> residuals);

}  // namespace resid_edf
