#pragma once

// Martingale-transform goodness-of-fit test for zero-mean normal errors
// with unknown scale, and the sup |B| law used for its critical values.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace resid_edf {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

/// h(x) = (1, -phi'(x)/phi(x), -(x phi(x))'/phi(x)) = (1, x, x^2 - 1)
Vec3 h_vec(double x) noexcept;

/// Gamma(t) = integral_t^inf h h^T phi, in closed form from truncated
/// Gaussian moments.
Mat3 gamma_mat(double t) noexcept;

/// Condition number of Gamma(t) (ratio of extreme eigenvalues).
double gamma_condition(double t);

struct TransformTableOptions {
  double lower = -8.5;
  double step = 1e-3;
  double max_condition = 1e10;
};

/// Cumulative H(t) = integral_{-inf}^t h^T(u) Gamma^{-1}(u) phi(u) du on a
/// uniform grid ending at the conditioning cutoff, the largest grid point
/// with cond(Gamma) <= max_condition.
class TransformTables {
 public:
  explicit TransformTables(const TransformTableOptions& options = {});

  /// Shared instance with default options.
  static const TransformTables& standard();

  [[nodiscard]] double lower() const noexcept { return lower_; }
  [[nodiscard]] double step() const noexcept { return step_; }
  [[nodiscard]] double cutoff() const noexcept { return cutoff_; }
  [[nodiscard]] std::size_t size() const noexcept { return cumulative_.size(); }
  [[nodiscard]] double grid_point(std::size_t k) const noexcept {
    return lower_ + static_cast<double>(k) * step_;
  }
  [[nodiscard]] const Vec3& cumulative(std::size_t k) const { return cumulative_.at(k); }
  [[nodiscard]] double condition(std::size_t k) const { return condition_.at(k); }

  /// Linear interpolation of H between grid points; zero below the grid.
  /// Throws InvalidArgument above the cutoff.
  [[nodiscard]] Vec3 H(double t) const;

 private:
  double lower_;
  double step_;
  double cutoff_ = 0.0;
  std::vector<Vec3> cumulative_;
  std::vector<double> condition_;
};

inline Vec3 H_transform(double t, const TransformTables& tables) { return tables.H(t); }

struct TestResult {
  double statistic = 0.0;
  double alpha = 0.05;
  double critical_value = 0.0;
  bool reject = false;
  std::size_t n_used = 0;
  /// Standardized residuals above the conditioning cutoff; they enter only
  /// through H(t ^ Z_j) h(Z_j) and are not used as evaluation points.
  std::size_t truncated_points = 0;
};

/// Value of N^{-1/2} sum_j {1[Z_j <= t] - H(t ^ Z_j) h(Z_j)} at t, from
/// already standardized residuals. Direct O(N) evaluation.
double transformed_process(std::span<const double> z, double t, const TransformTables& tables);

/// sup_t of |process|, taken over every standardized residual below the
/// cutoff and its left limit. Residuals are standardized by the root mean
/// square (no centering).
TestResult t_statistic(std::span<const double> residuals, const TransformTables& tables,
                       double alpha = 0.05);

/// P(sup_{0 <= t <= 1} |B(t)| <= x) by the alternating series
/// (4/pi) sum_k (-1)^k / (2k + 1) exp(-pi^2 (2k + 1)^2 / (8 x^2)).
double sup_brownian_cdf(double x);

/// x with sup_brownian_cdf(x) = 1 - alpha, by bisection to 1e-6 or better.
double critical_value(double alpha);

}  // namespace resid_edf
