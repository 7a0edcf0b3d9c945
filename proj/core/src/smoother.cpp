#include "resid_edf/smoother.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/Dense>

#include "resid_edf/errors.hpp"

namespace resid_edf {

DomainBox DomainBox::cube(int dimension, double lo, double hi) {
  if (dimension < 1) throw InvalidArgument("DomainBox: dimension must be >= 1");
  if (!(hi > lo)) throw InvalidArgument("DomainBox: hi must exceed lo");
  const auto m = static_cast<std::size_t>(dimension);
  return DomainBox{std::vector<double>(m, lo), std::vector<double>(m, hi)};
}

DomainBox DomainBox::bounding(const MarSample& sample) {
  if (sample.size() == 0) throw InsufficientData("DomainBox::bounding: empty sample");
  const auto m = static_cast<std::size_t>(sample.dimension());
  DomainBox box{std::vector<double>(sample.x(0).begin(), sample.x(0).end()),
                std::vector<double>(sample.x(0).begin(), sample.x(0).end())};
  for (std::size_t row = 1; row < sample.size(); ++row) {
    const auto x = sample.x(row);
    for (std::size_t j = 0; j < m; ++j) {
      box.lo[j] = std::min(box.lo[j], x[j]);
      box.hi[j] = std::max(box.hi[j], x[j]);
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!(box.hi[j] > box.lo[j])) {
      throw InvalidArgument("DomainBox::bounding: covariate " + std::to_string(j + 1) +
                            " is constant");
    }
  }
  return box;
}

double bandwidth_rule(std::size_t n, double scale, double exponent) {
  if (n < 2) throw InvalidArgument("bandwidth_rule: n must be >= 2");
  if (!(scale > 0.0)) throw InvalidArgument("bandwidth_rule: scale must be positive");
  if (!(exponent > 0.0)) throw InvalidArgument("bandwidth_rule: exponent must be positive");
  const double nn = static_cast<double>(n);
  return scale * std::pow(nn * std::log(nn), -exponent);
}

SmootherFit::SmootherFit(BasisSpec basis, ProductKernel kernel, double bandwidth,
                         DomainBox domain, SmootherOptions options)
    : basis_(std::move(basis)),
      kernel_(kernel),
      bandwidth_(bandwidth),
      domain_(std::move(domain)),
      options_(options) {
  for (std::size_t j = 0; j < domain_.dimension(); ++j) {
    axis_scale_.push_back(options_.bandwidth_scale == BandwidthScale::Covariate
                              ? 1.0 / (domain_.hi[j] - domain_.lo[j])
                              : 1.0);
  }
}

void SmootherFit::rescale(std::span<const double> x, std::span<double> u) const {
  for (std::size_t j = 0; j < x.size(); ++j) {
    u[j] = (x[j] - domain_.lo[j]) / (domain_.hi[j] - domain_.lo[j]);
  }
}

SmootherFit make_smoother_fit(std::span<const double> covariates, std::span<const double> responses,
                              int degree, const ProductKernel& kernel, double bandwidth,
                              DomainBox domain, const SmootherOptions& options) {
  const int m = kernel.dimension();
  const auto mm = static_cast<std::size_t>(m);
  if (domain.dimension() != mm) throw InvalidArgument("fit_local_poly: domain box dimension mismatch");
  for (std::size_t j = 0; j < mm; ++j) {
    if (!(domain.hi[j] > domain.lo[j])) throw InvalidArgument("fit_local_poly: empty domain box");
  }
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw InvalidArgument("fit_local_poly: bandwidth must be positive and finite");
  }
  if (covariates.size() != responses.size() * mm) {
    throw InvalidArgument("fit_local_poly: covariate and response counts disagree");
  }
  if (!(options.inflation_factor > 1.0) || options.max_inflations < 0) {
    throw InvalidArgument("fit_local_poly: invalid inflation options");
  }
  BasisSpec basis(degree, m);
  if (responses.size() < basis.size()) {
    throw InsufficientData("fit_local_poly: " + std::to_string(responses.size()) +
                           " complete cases, need at least " + std::to_string(basis.size()));
  }

  SmootherFit fit(std::move(basis), kernel, bandwidth, std::move(domain), options);
  const std::size_t n = responses.size();
  std::vector<double> rescaled(covariates.size());
  for (std::size_t row = 0; row < n; ++row) {
    fit.rescale(covariates.subspan(row * mm, mm), std::span(rescaled).subspan(row * mm, mm));
  }

  // Lexicographic order on (point, response) makes the stored layout, and
  // hence every floating point sum, independent of the input row order.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (std::size_t j = 0; j < mm; ++j) {
      const double ua = rescaled[a * mm + j];
      const double ub = rescaled[b * mm + j];
      if (ua != ub) return ua < ub;
    }
    return responses[a] < responses[b];
  });

  fit.points_.resize(covariates.size());
  fit.leading_.resize(n);
  fit.responses_.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t row = order[k];
    std::copy_n(rescaled.begin() + static_cast<std::ptrdiff_t>(row * mm), mm,
                fit.points_.begin() + static_cast<std::ptrdiff_t>(k * mm));
    fit.leading_[k] = rescaled[row * mm];
    fit.responses_[k] = responses[row];
  }
  return fit;
}

double SmootherFit::evaluate(std::span<const double> x) const {
  const auto mm = static_cast<std::size_t>(kernel_.dimension());
  if (x.size() != mm) throw InvalidArgument("SmootherFit::evaluate: dimension mismatch");

  constexpr double kDomainSlack = 1e-12;
  std::vector<double> u(mm);
  rescale(x, u);
  for (double uj : u) {
    if (!(uj >= -kDomainSlack && uj <= 1.0 + kDomainSlack)) {
      throw InvalidArgument("SmootherFit::evaluate: query point outside the domain box");
    }
  }

  const std::size_t p = basis_.size();
  std::vector<double> scaled(mm);
  std::vector<double> axis_bandwidth(mm);
  std::vector<double> basis_row(p);
  std::vector<std::size_t> window;
  std::vector<double> weights;
  bool saw_weight = false;

  double c = bandwidth_;
  for (int attempt = 0; attempt <= options_.max_inflations; ++attempt) {
    if (attempt > 0) c *= options_.inflation_factor;
    for (std::size_t j = 0; j < mm; ++j) axis_bandwidth[j] = c * axis_scale_[j];

    const auto first = std::lower_bound(leading_.begin(), leading_.end(), u[0] - axis_bandwidth[0]);
    const auto last = std::upper_bound(first, leading_.end(), u[0] + axis_bandwidth[0]);
    window.clear();
    weights.clear();
    for (auto it = first; it != last; ++it) {
      const auto k = static_cast<std::size_t>(it - leading_.begin());
      for (std::size_t j = 0; j < mm; ++j) scaled[j] = (points_[k * mm + j] - u[j]) / axis_bandwidth[j];
      const double w = kernel_.weight(scaled);
      if (w > 0.0) {
        window.push_back(k);
        weights.push_back(w);
      }
    }
    if (!window.empty()) saw_weight = true;
    if (window.size() < p) continue;

    Eigen::MatrixXd design(static_cast<Eigen::Index>(window.size()), static_cast<Eigen::Index>(p));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(window.size()));
    for (std::size_t r = 0; r < window.size(); ++r) {
      const std::size_t k = window[r];
      for (std::size_t j = 0; j < mm; ++j) scaled[j] = (points_[k * mm + j] - u[j]) / axis_bandwidth[j];
      basis_.evaluate(scaled, basis_row);
      const double root_w = std::sqrt(weights[r]);
      for (std::size_t i = 0; i < p; ++i) {
        design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = root_w * basis_row[i];
      }
      rhs(static_cast<Eigen::Index>(r)) = root_w * responses_[k];
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(options_.rank_threshold);
    if (qr.rank() < static_cast<Eigen::Index>(p)) continue;
    const Eigen::VectorXd beta = qr.solve(rhs);
    return beta(0);
  }

  if (!saw_weight) {
    throw EmptyWindow("SmootherFit::evaluate: no complete case within the bandwidth window");
  }
  throw RankDeficient("SmootherFit::evaluate: localized design rank deficient after " +
                      std::to_string(options_.max_inflations) + " bandwidth inflations");
}

double SmootherFit::evaluate(double x) const {
  return evaluate(std::span<const double>(&x, 1));
}

SmootherFit fit_local_poly_full(std::span<const double> covariates, std::span<const double> responses,
                                int degree, const ProductKernel& kernel, double bandwidth,
                                DomainBox domain, const SmootherOptions& options) {
  return make_smoother_fit(covariates, responses, degree, kernel, bandwidth, std::move(domain),
                           options);
}

SmootherFit fit_local_poly(const MarSample& sample, int degree, const ProductKernel& kernel,
                           double bandwidth, DomainBox domain, const SmootherOptions& options) {
  if (sample.dimension() != kernel.dimension()) {
    throw InvalidArgument("fit_local_poly: kernel dimension does not match the sample");
  }
  const auto mm = static_cast<std::size_t>(sample.dimension());
  std::vector<double> covariates;
  std::vector<double> responses;
  covariates.reserve(sample.covariates().size());
  responses.reserve(sample.size());
  for (std::size_t row = 0; row < sample.size(); ++row) {
    if (!sample.y(row)) continue;
    const auto x = sample.x(row);
    covariates.insert(covariates.end(), x.begin(), x.begin() + static_cast<std::ptrdiff_t>(mm));
    responses.push_back(*sample.y(row));
  }
  return make_smoother_fit(covariates, responses, degree, kernel, bandwidth, std::move(domain),
                           options);
}

SmootherFit fit_local_poly(const MarSample& sample, int degree, const ProductKernel& kernel,
                           double bandwidth, const SmootherOptions& options) {
  return fit_local_poly(sample, degree, kernel, bandwidth, DomainBox::bounding(sample), options);
}

std::vector<IndexedResidual> residuals_complete_case(const SmootherFit& fit, const MarSample& sample) {
  std::vector<IndexedResidual> out;
  out.reserve(sample.complete_count());
  for (std::size_t row = 0; row < sample.size(); ++row) {
    if (!sample.y(row)) continue;
    out.push_back({row, *sample.y(row) - fit.evaluate(sample.x(row))});
  }
  return out;
}

std::vector<double> residual_values(std::span<const IndexedResidual> residuals) {
  std::vector<double> out;
  out.reserve(residuals.size());
  for (const auto& r : residuals) out.push_back(r.residual);
  return out;
}

std::vector<double> fitted_values(const SmootherFit& fit, const MarSample& sample) {
  std::vector<double> out;
  out.reserve(sample.size());
  for (std::size_t row = 0; row < sample.size(); ++row) out.push_back(fit.evaluate(sample.x(row)));
  return out;
}

}  // namespace resid_edf
