#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace resid_edf {

/// Rows (X_j, delta_j Y_j, delta_j) with covariates in R^m. A row is a
/// complete case exactly when its response is present, so delta is derived
/// from the optional response rather than stored separately.
class MarSample {
 public:
  explicit MarSample(int dimension);

  /// Covariate-major storage: rows * dimension values, row j at [j*m, (j+1)*m).
  MarSample(int dimension, std::vector<double> covariates, std::vector<std::optional<double>> responses);

  void add_row(std::span<const double> x, std::optional<double> y);

  [[nodiscard]] int dimension() const noexcept { return dimension_; }
  [[nodiscard]] std::size_t size() const noexcept { return responses_.size(); }
  [[nodiscard]] std::span<const double> x(std::size_t row) const;
  [[nodiscard]] const std::optional<double>& y(std::size_t row) const { return responses_.at(row); }
  [[nodiscard]] int delta(std::size_t row) const { return responses_.at(row).has_value() ? 1 : 0; }

  /// N = sum of delta.
  [[nodiscard]] std::size_t complete_count() const noexcept;
  [[nodiscard]] std::vector<std::size_t> complete_rows() const;

  [[nodiscard]] const std::vector<double>& covariates() const noexcept { return covariates_; }
  [[nodiscard]] const std::vector<std::optional<double>>& responses() const noexcept {
    return responses_;
  }

  /// Copy with every response replaced (all rows complete).
  [[nodiscard]] MarSample with_responses(std::span<const double> y) const;

 private:
  int dimension_;
  std::vector<double> covariates_;
  std::vector<std::optional<double>> responses_;
};

/// CSV with header `x1,...,xm,y,delta`; a missing response is an empty field.
void write_sample_csv(std::ostream& out, const MarSample& sample);
std::string sample_to_csv(const MarSample& sample);

/// Reads the format above. Lines starting with '#' are ignored.
MarSample read_sample_csv(std::istream& in);
MarSample read_sample_csv_file(const std::string& path);

}  // namespace resid_edf
