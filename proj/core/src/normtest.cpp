#include "resid_edf/normtest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "resid_edf/errors.hpp"

namespace resid_edf {

namespace {

double std_normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_upper(double x) noexcept { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

Eigen::Matrix3d to_eigen(const Mat3& m) {
  Eigen::Matrix3d out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out(r, c) = m[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  return out;
}

double dot(const Vec3& a, const Vec3& b) noexcept { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

}  // namespace

Vec3 h_vec(double x) noexcept { return {1.0, x, x * x - 1.0}; }

Mat3 gamma_mat(double t) noexcept {
  const double q = std_normal_upper(t);
  const double p = std_normal_pdf(t);
  const double tp = t * p;
  const double a = (t * t + 1.0) * p;
  return Mat3{{{q, p, tp}, {p, q + tp, a}, {tp, a, 2.0 * q + (t * t * t + t) * p}}};
}

double gamma_condition(double t) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(to_eigen(gamma_mat(t)),
                                                           Eigen::EigenvaluesOnly);
  const auto& values = eig.eigenvalues();
  const double smallest = values.minCoeff();
  if (!(smallest > 0.0)) return std::numeric_limits<double>::infinity();
  return values.maxCoeff() / smallest;
}

TransformTables::TransformTables(const TransformTableOptions& options)
    : lower_(options.lower), step_(options.step) {
  if (!(options.step > 0.0) || !(options.max_condition > 1.0)) {
    throw InvalidArgument("TransformTables: invalid grid options");
  }
  auto integrand = [](double u, double& cond) {
    const Eigen::Matrix3d gamma = to_eigen(gamma_mat(u));
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(gamma);
    const auto& values = eig.eigenvalues();
    cond = values.minCoeff() > 0.0 ? values.maxCoeff() / values.minCoeff()
                                   : std::numeric_limits<double>::infinity();
    const Vec3 h = h_vec(u);
    const Eigen::Vector3d hv(h[0], h[1], h[2]);
    // Gamma is symmetric, so h^T Gamma^{-1} = (Gamma^{-1} h)^T.
    const Eigen::Vector3d row = eig.eigenvectors() *
                                (eig.eigenvectors().transpose() * hv).cwiseQuotient(values) *
                                std_normal_pdf(u);
    return Vec3{row(0), row(1), row(2)};
  };

  double cond = 0.0;
  Vec3 previous = integrand(lower_, cond);
  if (cond > options.max_condition) {
    throw InvalidArgument("TransformTables: Gamma is ill conditioned at the grid start");
  }
  cumulative_.push_back({0.0, 0.0, 0.0});
  condition_.push_back(cond);
  for (std::size_t k = 1;; ++k) {
    const double u = lower_ + static_cast<double>(k) * step_;
    const Vec3 current = integrand(u, cond);
    if (!(cond <= options.max_condition)) break;
    Vec3 next = cumulative_.back();
    for (std::size_t i = 0; i < 3; ++i) next[i] += 0.5 * step_ * (previous[i] + current[i]);
    cumulative_.push_back(next);
    condition_.push_back(cond);
    previous = current;
  }
  cutoff_ = grid_point(cumulative_.size() - 1);
}

const TransformTables& TransformTables::standard() {
  static const TransformTables tables{};
  return tables;
}

Vec3 TransformTables::H(double t) const {
  if (std::isnan(t)) throw InvalidArgument("TransformTables::H: t is NaN");
  if (t <= lower_) return {0.0, 0.0, 0.0};
  if (t > cutoff_ + 1e-12) {
    throw InvalidArgument("TransformTables::H: t above the conditioning cutoff");
  }
  const double position = (t - lower_) / step_;
  auto k = static_cast<std::size_t>(position);
  if (k + 1 >= cumulative_.size()) return cumulative_.back();
  const double frac = position - static_cast<double>(k);
  const Vec3& a = cumulative_[k];
  const Vec3& b = cumulative_[k + 1];
  return {a[0] + frac * (b[0] - a[0]), a[1] + frac * (b[1] - a[1]), a[2] + frac * (b[2] - a[2])};
}

double transformed_process(std::span<const double> z, double t, const TransformTables& tables) {
  if (z.empty()) throw InsufficientData("transformed_process: no residuals");
  double sum = 0.0;
  for (double zj : z) {
    if (zj <= t) sum += 1.0;
    sum -= dot(tables.H(std::min(t, zj)), h_vec(zj));
  }
  return sum / std::sqrt(static_cast<double>(z.size()));
}

TestResult t_statistic(std::span<const double> residuals, const TransformTables& tables,
                       double alpha) {
  const std::size_t n = residuals.size();
  if (n < 2) throw InsufficientData("t_statistic: need at least 2 residuals");
  double sum_sq = 0.0;
  for (double r : residuals) sum_sq += r * r;
  const double sigma = std::sqrt(sum_sq / static_cast<double>(n));
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DegenerateScale("t_statistic: residual scale is zero");
  }

  std::vector<double> z(residuals.begin(), residuals.end());
  for (double& v : z) v /= sigma;
  std::sort(z.begin(), z.end());

  const double cutoff = tables.cutoff();
  const std::size_t evaluable =
      static_cast<std::size_t>(std::upper_bound(z.begin(), z.end(), cutoff) - z.begin());
  if (evaluable == 0) {
    throw InvalidArgument("t_statistic: every standardized residual lies above the cutoff");
  }

  // prefix[k] = sum_{j<k} (1 - H(z_j) h(z_j)), suffix[k] = sum_{j>=k} h(z_j).
  std::vector<double> prefix(evaluable + 1, 0.0);
  for (std::size_t j = 0; j < evaluable; ++j) {
    prefix[j + 1] = prefix[j] + 1.0 - dot(tables.H(z[j]), h_vec(z[j]));
  }
  std::vector<Vec3> suffix(n + 1, Vec3{0.0, 0.0, 0.0});
  for (std::size_t j = n; j-- > 0;) {
    const Vec3 h = h_vec(z[j]);
    for (std::size_t i = 0; i < 3; ++i) suffix[j][i] = suffix[j + 1][i] + h[i];
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  double sup = 0.0;
  std::size_t k = 0;
  while (k < evaluable) {
    std::size_t end = k;
    while (end < n && z[end] == z[k]) ++end;
    const Vec3 H = tables.H(z[k]);
    const double left = prefix[k] - dot(H, suffix[k]);
    const double at = prefix[std::min(end, evaluable)] - dot(H, suffix[end]);
    sup = std::max({sup, std::abs(left) * scale, std::abs(at) * scale});
    k = end;
  }

  TestResult result;
  result.statistic = sup;
  result.alpha = alpha;
  result.critical_value = critical_value(alpha);
  result.reject = result.statistic > result.critical_value;
  result.n_used = n;
  result.truncated_points = n - evaluable;
  return result;
}

double sup_brownian_cdf(double x) {
  if (!(x > 0.0)) throw InvalidArgument("sup_brownian_cdf: x must be positive");
  const double c = std::numbers::pi * std::numbers::pi / (8.0 * x * x);
  double sum = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double odd = 2.0 * k + 1.0;
    const double term = std::exp(-c * odd * odd) / odd;
    sum += (k % 2 == 0) ? term : -term;
    if (term < 1e-12) break;
  }
  return std::clamp(4.0 / std::numbers::pi * sum, 0.0, 1.0);
}

double critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("critical_value: alpha must lie in (0, 1)");
  const double target = 1.0 - alpha;
  double lo = 1e-3;
  double hi = 50.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (sup_brownian_cdf(mid) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace resid_edf
