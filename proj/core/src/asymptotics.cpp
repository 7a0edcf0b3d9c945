#include "resid_edf/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "resid_edf/errors.hpp"

namespace resid_edf {

namespace {

constexpr double kQuadratureTolerance = 1e-9;

double integrate_piece(const std::function<double(double)>& g, double a, double b) {
  if (!(b > a)) return 0.0;
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      g, a, b, 25, kQuadratureTolerance, &error, &l1);
  if (!std::isfinite(value) || error > 1e-7 * std::max(1.0, l1)) {
    throw IntegrationFailure("quadrature did not reach tolerance on [" + std::to_string(a) + ", " +
                             std::to_string(b) + "]");
  }
  return value;
}

}  // namespace

ErrorLawSpec ErrorLawSpec::normal(double variance) {
  if (!(variance > 0.0)) throw InvalidArgument("normal law: variance must be positive");
  const double sd = std::sqrt(variance);
  boost::math::normal_distribution<double> dist(0.0, sd);
  ErrorLawSpec spec;
  spec.name = "normal";
  spec.cdf = [dist](double t) { return boost::math::cdf(dist, t); };
  spec.pdf = [dist](double t) { return boost::math::pdf(dist, t); };
  spec.score = [variance](double z) { return z / variance; };
  spec.variance = variance;
  spec.fisher = 1.0 / variance;
  spec.partial_mean = [dist, variance](double t) { return -variance * boost::math::pdf(dist, t); };
  return spec;
}

ErrorLawSpec ErrorLawSpec::laplace(double scale) {
  if (!(scale > 0.0)) throw InvalidArgument("laplace law: scale must be positive");
  const double b = scale;
  ErrorLawSpec spec;
  spec.name = "laplace";
  spec.cdf = [b](double t) {
    return t < 0.0 ? 0.5 * std::exp(t / b) : 1.0 - 0.5 * std::exp(-t / b);
  };
  spec.pdf = [b](double t) { return std::exp(-std::abs(t) / b) / (2.0 * b); };
  spec.score = [b](double z) { return z > 0.0 ? 1.0 / b : (z < 0.0 ? -1.0 / b : 0.0); };
  spec.variance = 2.0 * b * b;
  spec.fisher = 1.0 / (b * b);
  spec.partial_mean = [b](double t) {
    return t <= 0.0 ? 0.5 * (t - b) * std::exp(t / b) : -0.5 * (t + b) * std::exp(-t / b);
  };
  spec.kinks = {0.0};
  return spec;
}

ErrorLawSpec ErrorLawSpec::student_t(double dof) {
  if (!(dof > 2.0)) throw InvalidArgument("student t law: need more than 2 degrees of freedom");
  boost::math::students_t_distribution<double> dist(dof);
  ErrorLawSpec spec;
  spec.name = "student_t";
  spec.cdf = [dist](double t) { return boost::math::cdf(dist, t); };
  spec.pdf = [dist](double t) { return boost::math::pdf(dist, t); };
  spec.score = [dof](double z) { return (dof + 1.0) * z / (dof + z * z); };
  spec.variance = dof / (dof - 2.0);
  spec.fisher = (dof + 1.0) / (dof + 3.0);
  spec.partial_mean = [dist, dof](double t) {
    return -(dof + t * t) / (dof - 1.0) * boost::math::pdf(dist, t);
  };
  return spec;
}

ErrorLawSpec ErrorLawSpec::centered_chisq1() {
  // eps = Z^2 - 1 with Z standard normal.
  ErrorLawSpec spec;
  spec.name = "chisq1_centered";
  spec.cdf = [](double t) {
    if (t <= -1.0) return 0.0;
    return std::erf(std::sqrt((t + 1.0) / 2.0));
  };
  spec.pdf = [](double t) {
    if (t <= -1.0) return 0.0;
    const double y = t + 1.0;
    return std::exp(-0.5 * y) / std::sqrt(2.0 * std::numbers::pi * y);
  };
  spec.score = [](double z) {
    if (z <= -1.0) return 0.0;
    return 0.5 / (z + 1.0) + 0.5;
  };
  spec.variance = 2.0;
  spec.fisher = std::numeric_limits<double>::infinity();
  spec.partial_mean = [](double t) {
    if (t <= -1.0) return 0.0;
    const double s = std::sqrt(t + 1.0);
    return -2.0 * s * std::exp(-0.5 * s * s) / std::sqrt(2.0 * std::numbers::pi);
  };
  spec.support_lo = -1.0;
  return spec;
}

ErrorLawSpec ErrorLawSpec::for_law(ErrorLaw law) {
  switch (law) {
    case ErrorLaw::Normal1: return normal(1.0);
    case ErrorLaw::Normal2: return normal(2.0);
    case ErrorLaw::Chisq1Centered: return centered_chisq1();
    case ErrorLaw::T4: return student_t(4.0);
    case ErrorLaw::Laplace: return laplace(1.0);
  }
  throw InvalidArgument("ErrorLawSpec::for_law: unknown law");
}

double ErrorLawSpec::expect(const std::function<double(double)>& h,
                            std::vector<double> breakpoints) const {
  breakpoints.insert(breakpoints.end(), kinks.begin(), kinks.end());
  std::erase_if(breakpoints, [&](double b) { return !(b > support_lo && b < support_hi); });
  std::sort(breakpoints.begin(), breakpoints.end());
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

  const auto integrand = [&](double z) {
    const double density = pdf(z);
    return density == 0.0 ? 0.0 : h(z) * density;
  };
  // A finite lower support point may carry an integrable density
  // singularity (chi^2_1 - 1 at -1); z = lo + s^2 removes it.
  const auto piece = [&](double a, double b) {
    if (a != support_lo || !std::isfinite(a)) return integrate_piece(integrand, a, b);
    const auto substituted = [&](double s) { return s == 0.0 ? 0.0 : 2.0 * s * integrand(a + s * s); };
    return integrate_piece(substituted, 0.0, std::isfinite(b) ? std::sqrt(b - a) : b);
  };
  double total = 0.0;
  double a = support_lo;
  for (double b : breakpoints) {
    total += piece(a, b);
    a = b;
  }
  total += piece(a, support_hi);
  return total;
}

double ErrorLawSpec::fisher_information() const {
  if (fisher) return *fisher;
  return expect([this](double z) {
    const double l = score(z);
    return l * l;
  });
}

double ErrorLawSpec::truncated_mean(double t) const {
  if (partial_mean) return partial_mean(t);
  if (t <= support_lo) return 0.0;
  return expect([t](double z) { return z <= t ? z : 0.0; }, {t});
}

EfficiencyContext::EfficiencyContext(ErrorLawSpec law_spec, double e_delta_value)
    : law(std::move(law_spec)), e_delta(e_delta_value) {
  if (!(e_delta > 0.0 && e_delta <= 1.0)) {
    throw InvalidArgument("EfficiencyContext: E delta must lie in (0, 1]");
  }
}

double influence(const EfficiencyContext& ctx, int delta, double eps, double t) {
  if (delta == 0) return 0.0;
  const double indicator = eps <= t ? 1.0 : 0.0;
  return (indicator - ctx.law.cdf(t) + eps * ctx.law.pdf(t)) / ctx.e_delta;
}

double asym_variance_F(const EfficiencyContext& ctx, double t) {
  if (std::isinf(t)) return 0.0;
  const double F = ctx.law.cdf(t);
  const double f = ctx.law.pdf(t);
  const double value =
      F * (1.0 - F) + 2.0 * f * ctx.law.truncated_mean(t) + f * f * ctx.law.variance;
  return std::max(0.0, value) / ctx.e_delta;
}

EhGradient::EhGradient(EfficiencyContext ctx, std::function<double(double)> h,
                       std::vector<double> breakpoints)
    : ctx_(std::move(ctx)), h_(std::move(h)) {
  const ErrorLawSpec& law = ctx_.law;
  mean_h_ = law.expect(h_, breakpoints);
  mean_score_h_ = law.expect([&](double z) { return law.score(z) * h_(z); }, breakpoints);
  mean_eps_h_ = law.expect([&](double z) { return z * h_(z); }, breakpoints);
  mean_h0_l0_ = law.expect([&](double z) { return h0(z) * l0(z); }, breakpoints);
  t_star_ = -law.variance / ctx_.e_delta * mean_h0_l0_;

  // E[h0 l0] = E[l h] - E[eps h] / sigma^2 since E l = 0 and E[eps l] = 1;
  // with this identity the component form equals the direct form.
  const double collapsed = mean_score_h_ - mean_eps_h_ / law.variance;
  const double scale = std::max({1.0, std::abs(mean_score_h_), std::abs(mean_eps_h_)});
  if (std::abs(collapsed - mean_h0_l0_) > 1e-6 * scale) {
    throw IntegrationFailure("EhGradient: canonical gradient components do not reassemble");
  }
}

double EhGradient::h0(double z) const {
  return h_(z) - mean_h_ - z * mean_eps_h_ / ctx_.law.variance;
}

double EhGradient::l0(double z) const { return ctx_.law.score(z) - z / ctx_.law.variance; }

double EhGradient::s_star(double z) const {
  return (h0(z) + ctx_.law.variance * mean_h0_l0_ * l0(z)) / ctx_.e_delta;
}

double EhGradient::operator()(int delta, double eps) const {
  if (delta == 0) return 0.0;
  return (h_(eps) - mean_h_ - mean_score_h_ * eps) / ctx_.e_delta;
}

double EhGradient::from_components(int delta, double eps) const {
  if (delta == 0) return 0.0;
  return s_star(eps) + ctx_.law.score(eps) * t_star_;
}

double e_delta_uniform_logistic() noexcept { return 0.5; }

double e_delta(const std::function<double(double)>& propensity_fn,
               const std::function<double(double)>& covariate_density, double lo, double hi) {
  if (!(hi > lo)) throw InvalidArgument("e_delta: empty covariate range");
  return integrate_piece([&](double x) { return propensity_fn(x) * covariate_density(x); }, lo, hi);
}

}  // namespace resid_edf
