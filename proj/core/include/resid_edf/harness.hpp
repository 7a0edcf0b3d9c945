#pragma once

// Monte Carlo driver for the n * MSE table of the residual EDF estimators
// and the level / power table of the normality tests.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "resid_edf/data.hpp"
#include "resid_edf/edf.hpp"
#include "resid_edf/normtest.hpp"

namespace resid_edf {

std::string_view version() noexcept;

/// Smoothing choices shared by every replicate.
struct SmootherConfig {
  int degree = 1;
  int kernel_exponent = 4;
  double bandwidth_scale = 1.25;
  double bandwidth_exponent = 0.25;
  BandwidthScale bandwidth_units = BandwidthScale::Covariate;
  Imputation imputation = Imputation::Full;
};

/// What a replicate computes.
struct ReplicateOutputs {
  std::vector<double> eval_points;
  bool tuned = true;
  bool normtest = false;
  double alpha = 0.05;
  /// Sup-norm remainder of the first order expansion of the complete-case EDF.
  bool expansion_remainder = false;
  SmootherConfig smoother{};
};

struct ReplicateRecord {
  std::uint64_t seed = 0;
  std::size_t n = 0;
  ErrorLaw law = ErrorLaw::Normal1;
  std::size_t complete = 0;
  double bandwidth = 0.0;
  std::vector<double> eval_points;
  std::vector<double> fhat_c;
  std::vector<double> ftilde;
  std::optional<TestResult> test_c;
  std::optional<TestResult> test_tuned;
  std::optional<double> remainder;
  /// Empty on success, else the error message of the failing step.
  std::string failure;

  [[nodiscard]] bool ok() const noexcept { return failure.empty(); }

  /// Header matching csv_row().
  [[nodiscard]] std::string csv_header() const;
  [[nodiscard]] std::string csv_row() const;
};

/// One generated sample pushed through the smoothers, EDFs and tests.
/// Library errors are caught and stored in the record's failure field.
ReplicateRecord run_single(std::uint64_t seed, const SimDesign& design, const ReplicateOutputs& outputs);

/// sup_t |Fhat(t) - N^{-1} sum 1[eps_j <= t] - f(t) N^{-1} sum eps_j| for the
/// complete-case residuals and the matching true errors. Exact: the sup is
/// attained at a jump (or its left limit) or at the mode of f.
double expansion_remainder(std::span<const double> residuals, std::span<const double> errors,
                           const std::function<double(double)>& density, double mode = 0.0);

struct TableCell {
  std::string row;       // sample size (or "true") for MSE, error law for power
  std::string column;    // evaluation point for MSE, sample size for power
  std::string estimator; // Fhat_c / Ftilde / asymptotic, or T_c / T_iota
  double value = 0.0;
  double se = 0.0;
  std::size_t replicates = 0;
  std::size_t failures = 0;
};

struct TableReport {
  std::string kind;
  std::vector<std::string> column_names;
  /// key=value pairs written into the header comment.
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<TableCell> cells;

  [[nodiscard]] const TableCell* find(const std::string& row, const std::string& column,
                                      const std::string& estimator) const;
  void write_csv(std::ostream& out) const;
  [[nodiscard]] std::string to_csv() const;
};

struct MseConfig {
  std::vector<std::size_t> sample_sizes{50, 250, 1000};
  std::vector<double> eval_points{-1.5, -1.0, 0.0, 1.0, 1.5};
  std::size_t runs = 1000;
  std::uint64_t master_seed = 20140101;
  ErrorLaw law = ErrorLaw::Normal1;
  SmootherConfig smoother{};
  /// 0 means one per hardware thread. Results do not depend on it.
  unsigned threads = 0;
  /// Abort when more than this fraction of replicates in a cell fail.
  double max_failure_fraction = 0.05;
};

struct PowerConfig {
  std::vector<ErrorLaw> laws{ErrorLaw::Normal2, ErrorLaw::Chisq1Centered, ErrorLaw::T4,
                             ErrorLaw::Laplace};
  std::vector<std::size_t> sample_sizes{50, 200};
  std::size_t runs = 1000;
  double alpha = 0.05;
  std::uint64_t master_seed = 20140101;
  SmootherConfig smoother{};
  unsigned threads = 0;
  double max_failure_fraction = 0.05;
};

/// Seed of replicate r in the MSE cell for sample size n.
std::uint64_t mse_replicate_seed(std::uint64_t master, std::size_t n, std::size_t replicate);
/// Seed of replicate r in the power cell (law, n).
std::uint64_t power_replicate_seed(std::uint64_t master, ErrorLaw law, std::size_t n,
                                   std::size_t replicate);

/// Replicates of one MSE cell, in replicate order.
std::vector<ReplicateRecord> run_mse_cell(const MseConfig& cfg, std::size_t n,
                                          const ReplicateOutputs& outputs);

TableReport run_mse(const MseConfig& cfg);
TableReport run_power(const PowerConfig& cfg);

/// Runs body(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace resid_edf
