#pragma once

// Closed-form efficiency quantities for residual-based estimators of the
// error distribution under responses missing at random.

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "resid_edf/data.hpp"

namespace resid_edf {

/// Error law with what the efficiency formulas need: cdf F, density f,
/// location score l = -f'/f, variance and Fisher information J.
struct ErrorLawSpec {
  std::string name;
  std::function<double(double)> cdf;
  std::function<double(double)> pdf;
  std::function<double(double)> score;
  double variance = 1.0;
  /// Analytic J when known; infinite when the score is not square integrable.
  std::optional<double> fisher;
  /// Analytic E[eps 1(eps <= t)] when known.
  std::function<double(double)> partial_mean;
  double support_lo = -std::numeric_limits<double>::infinity();
  double support_hi = std::numeric_limits<double>::infinity();
  /// Points where f or l is not smooth; quadrature splits there.
  std::vector<double> kinks;

  static ErrorLawSpec normal(double variance);
  static ErrorLawSpec laplace(double scale);
  static ErrorLawSpec student_t(double dof);
  static ErrorLawSpec centered_chisq1();
  static ErrorLawSpec for_law(ErrorLaw law);

  /// E[h(eps)] by adaptive quadrature split at the law's kinks and at the
  /// extra breakpoints (tolerance 1e-9).
  [[nodiscard]] double expect(const std::function<double(double)>& h,
                              std::vector<double> breakpoints = {}) const;

  /// Analytic J if available, else quadrature of l^2 f.
  [[nodiscard]] double fisher_information() const;

  /// E[eps 1(eps <= t)], analytic if available.
  [[nodiscard]] double truncated_mean(double t) const;
};

struct EfficiencyContext {
  EfficiencyContext(ErrorLawSpec law, double e_delta);

  ErrorLawSpec law;
  double e_delta;
};

/// b(delta, eps, t) = (delta / E delta) {1[eps <= t] - F(t) + eps f(t)}
double influence(const EfficiencyContext& ctx, int delta, double eps, double t);

/// E[b^2] = (1/E delta) {F(1 - F) + 2 f(t) E[eps 1(eps <= t)] + f(t)^2 sigma^2}
double asym_variance_F(const EfficiencyContext& ctx, double t);

/// Canonical gradient of the functional E[h(eps)]. Construction computes the
/// projection h0 of h and the component quantities s*, t*, and checks that the
/// two forms of the gradient agree.
class EhGradient {
 public:
  EhGradient(EfficiencyContext ctx, std::function<double(double)> h,
             std::vector<double> breakpoints = {});

  /// (delta / E delta) {h(eps) - E h - E[l h] eps}
  [[nodiscard]] double operator()(int delta, double eps) const;

  /// delta {s*(eps) + l(eps) t*}, assembled from the components.
  [[nodiscard]] double from_components(int delta, double eps) const;

  /// h0(z) = h(z) - E h - z E[eps h] / sigma^2
  [[nodiscard]] double h0(double z) const;
  /// l0(z) = l(z) - z / sigma^2
  [[nodiscard]] double l0(double z) const;
  [[nodiscard]] double s_star(double z) const;
  [[nodiscard]] double t_star() const noexcept { return t_star_; }

  [[nodiscard]] double mean_h() const noexcept { return mean_h_; }
  [[nodiscard]] double mean_score_h() const noexcept { return mean_score_h_; }
  [[nodiscard]] double mean_eps_h() const noexcept { return mean_eps_h_; }
  /// E[h0 l0] by quadrature.
  [[nodiscard]] double mean_h0_l0() const noexcept { return mean_h0_l0_; }

 private:
  EfficiencyContext ctx_;
  std::function<double(double)> h_;
  double mean_h_ = 0.0;
  double mean_score_h_ = 0.0;
  double mean_eps_h_ = 0.0;
  double mean_h0_l0_ = 0.0;
  double t_star_ = 0.0;
};

inline double canonical_gradient_Eh(const EhGradient& gradient, int delta, double eps) {
  return gradient(delta, eps);
}

/// E delta for X ~ U(-1, 1) with logistic propensity: exactly 1/2.
double e_delta_uniform_logistic() noexcept;

/// E delta = integral of pi(x) g(x) over [lo, hi] by quadrature.
double e_delta(const std::function<double(double)>& propensity,
               const std::function<double(double)>& covariate_density, double lo, double hi);

}  // namespace resid_edf
