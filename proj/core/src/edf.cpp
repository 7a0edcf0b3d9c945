#include "resid_edf/edf.hpp"

#include <algorithm>
#include <ostream>

#include "resid_edf/errors.hpp"
#include "resid_edf/format.hpp"

namespace resid_edf {

EdfEstimate EdfEstimate::from_values(std::span<const double> values) {
  if (values.empty()) throw InsufficientData("EdfEstimate: no complete cases (N = 0)");
  std::vector<double> sorted(values.begin(), values.end());
  std::stable_sort(sorted.begin(), sorted.end());
  return EdfEstimate(std::move(sorted));
}

double EdfEstimate::operator()(double t) const noexcept {
  const auto it = std::upper_bound(jumps_.begin(), jumps_.end(), t);
  return static_cast<double>(it - jumps_.begin()) / static_cast<double>(jumps_.size());
}

void EdfEstimate::write_csv(std::ostream& out) const {
  out << "t,F\n";
  const double n = static_cast<double>(jumps_.size());
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    if (k + 1 < jumps_.size() && jumps_[k + 1] == jumps_[k]) continue;
    out << format_double(jumps_[k]) << ',' << format_double(static_cast<double>(k + 1) / n) << '\n';
  }
}

EdfEstimate edf_complete_case(const MarSample& sample, const SmootherFit& fit) {
  if (sample.complete_count() == 0) throw InsufficientData("edf_complete_case: N = 0");
  const auto residuals = residuals_complete_case(fit, sample);
  return EdfEstimate::from_values(residual_values(residuals));
}

std::vector<IndexedResidual> tuned_residuals(const MarSample& sample, int degree,
                                             const ProductKernel& kernel, double c1, double c2,
                                             DomainBox domain, const TunedOptions& options) {
  const SmootherFit first = fit_local_poly(sample, degree, kernel, c1, domain, options.smoother);
  std::vector<double> completed = fitted_values(first, sample);
  if (options.imputation == Imputation::Partial) {
    for (std::size_t row = 0; row < sample.size(); ++row) {
      if (sample.y(row)) completed[row] = *sample.y(row);
    }
  }
  const SmootherFit second = fit_local_poly_full(sample.covariates(), completed, degree, kernel, c2,
                                                 std::move(domain), options.smoother);
  return residuals_complete_case(second, sample);
}

EdfEstimate edf_tuned(const MarSample& sample, int degree, const ProductKernel& kernel, double c1,
                      double c2, DomainBox domain, const TunedOptions& options) {
  const auto residuals = tuned_residuals(sample, degree, kernel, c1, c2, std::move(domain), options);
  return EdfEstimate::from_values(residual_values(residuals));
}

double sigma2_complete_case(std::span<const double> residuals) {
  if (residuals.empty()) throw InsufficientData("sigma2_complete_case: N = 0");
  double sum = 0.0;
  for (double r : residuals) sum += r * r;
  return sum / static_cast<double>(residuals.size());
}

}  // namespace resid_edf
