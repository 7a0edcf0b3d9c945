#pragma once

// Local polynomial regression by kernel-weighted least squares, in the
// full-data form and in the complete-case form that only uses rows with an
// observed response.

#include <cstddef>
#include <span>
#include <vector>

#include "resid_edf/polybasis.hpp"
#include "resid_edf/sample.hpp"

namespace resid_edf {

/// Per-coordinate interval [lo, hi]. Covariates are mapped affinely onto
/// [0, 1]^m before smoothing.
struct DomainBox {
  std::vector<double> lo;
  std::vector<double> hi;

  [[nodiscard]] std::size_t dimension() const noexcept { return lo.size(); }

  static DomainBox cube(int dimension, double lo, double hi);
  /// Smallest box holding every row's covariates, complete or not.
  static DomainBox bounding(const MarSample& sample);
};

/// scale * (n log n)^(-exponent). The default exponent 1/4 corresponds to
/// smoothness s = 2 in the general (n log n)^(-1/(2s)) rate.
double bandwidth_rule(std::size_t n, double scale, double exponent = 0.25);

/// Coordinates the bandwidth is measured in.
enum class BandwidthScale {
  /// Natural covariate units: the kernel window is x +- c in every coordinate.
  Covariate,
  /// The rescaled unit cube: the window is c * (hi - lo) per coordinate.
  UnitCube,
};

struct SmootherOptions {
  BandwidthScale bandwidth_scale = BandwidthScale::Covariate;
  /// Multiplicative bandwidth inflation applied at a query point whose
  /// localized design is empty or rank deficient.
  double inflation_factor = 1.1;
  int max_inflations = 25;
  /// Relative pivot threshold for the rank-revealing QR.
  double rank_threshold = 1e-10;
};

class SmootherFit {
 public:
  /// Local polynomial estimate (the intercept coefficient) at x.
  [[nodiscard]] double evaluate(std::span<const double> x) const;
  [[nodiscard]] double evaluate(double x) const;

  [[nodiscard]] const BasisSpec& basis() const noexcept { return basis_; }
  [[nodiscard]] const ProductKernel& kernel() const noexcept { return kernel_; }
  [[nodiscard]] double bandwidth() const noexcept { return bandwidth_; }
  [[nodiscard]] const DomainBox& domain() const noexcept { return domain_; }
  [[nodiscard]] std::size_t rows_used() const noexcept { return responses_.size(); }
  [[nodiscard]] const SmootherOptions& options() const noexcept { return options_; }

 private:
  friend SmootherFit make_smoother_fit(std::span<const double>, std::span<const double>, int,
                                       const ProductKernel&, double, DomainBox,
                                       const SmootherOptions&);

  SmootherFit(BasisSpec basis, ProductKernel kernel, double bandwidth, DomainBox domain,
              SmootherOptions options);

  void rescale(std::span<const double> x, std::span<double> u) const;

  BasisSpec basis_;
  ProductKernel kernel_;
  double bandwidth_;
  DomainBox domain_;
  SmootherOptions options_;
  // Bandwidth multiplier per rescaled axis.
  std::vector<double> axis_scale_;
  // Rows sorted by rescaled first coordinate, row-major m values each.
  std::vector<double> points_;
  std::vector<double> leading_;
  std::vector<double> responses_;
};

/// Full-model fit on rows (covariates[j*m .. j*m+m), responses[j]).
SmootherFit fit_local_poly_full(std::span<const double> covariates, std::span<const double> responses,
                                int degree, const ProductKernel& kernel, double bandwidth,
                                DomainBox domain, const SmootherOptions& options = {});

/// Complete-case fit: only rows with delta = 1 enter the least-squares problem.
SmootherFit fit_local_poly(const MarSample& sample, int degree, const ProductKernel& kernel,
                           double bandwidth, DomainBox domain, const SmootherOptions& options = {});

/// Same, with the domain box taken as the bounding box of all covariates.
SmootherFit fit_local_poly(const MarSample& sample, int degree, const ProductKernel& kernel,
                           double bandwidth, const SmootherOptions& options = {});

struct IndexedResidual {
  std::size_t index;
  double residual;
};

/// Y_j - rhat(X_j) for every complete case, in row order.
std::vector<IndexedResidual> residuals_complete_case(const SmootherFit& fit, const MarSample& sample);

/// Residual values only.
std::vector<double> residual_values(std::span<const IndexedResidual> residuals);

/// rhat(X_j) for every row, complete or not.
std::vector<double> fitted_values(const SmootherFit& fit, const MarSample& sample);

}  // namespace resid_edf
