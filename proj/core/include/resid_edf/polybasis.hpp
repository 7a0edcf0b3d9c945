#pragma once

// Multi-indices, scaled monomials and compactly supported product kernels
// for local polynomial smoothing in R^m.

#include <cstddef>
#include <span>
#include <vector>

namespace resid_edf {

/// Exponent vector i = (i_1, ..., i_m) with nonnegative entries.
class MultiIndex {
 public:
  explicit MultiIndex(std::vector<int> exponents);

  [[nodiscard]] std::size_t dimension() const noexcept { return exponents_.size(); }
  [[nodiscard]] int order() const noexcept { return order_; }
  [[nodiscard]] const std::vector<int>& exponents() const noexcept { return exponents_; }
  [[nodiscard]] int operator[](std::size_t j) const { return exponents_[j]; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> exponents_;
  int order_ = 0;
};

/// All multi-indices of order <= d in dimension m, graded lexicographic,
/// zero index first. Size is binomial(m + d, d).
std::vector<MultiIndex> multi_index_set(int degree, int dimension);

/// psi_i(x) = prod_j x_j^{i_j} / i_j!
double psi(const MultiIndex& index, std::span<const double> x);

/// The index set I(d) together with its degree and dimension.
class BasisSpec {
 public:
  BasisSpec(int degree, int dimension);

  [[nodiscard]] int degree() const noexcept { return degree_; }
  [[nodiscard]] int dimension() const noexcept { return dimension_; }
  [[nodiscard]] std::size_t size() const noexcept { return indices_.size(); }
  [[nodiscard]] const std::vector<MultiIndex>& indices() const noexcept { return indices_; }

  /// Writes psi_i(u) for every index into out (out.size() == size()).
  void evaluate(std::span<const double> u, std::span<double> out) const;

 private:
  int degree_;
  int dimension_;
  std::vector<MultiIndex> indices_;
};

/// w(u) = prod_j C_k (1 - u_j^2)^k on [-1, 1]^m. Each factor is a density
/// and is (k - 1)-times continuously differentiable on R.
class ProductKernel {
 public:
  ProductKernel(int exponent, int dimension);

  /// Default exponent k = m + 3, enough for (m + 2)-fold differentiability.
  static ProductKernel for_dimension(int dimension);

  [[nodiscard]] int exponent() const noexcept { return exponent_; }
  [[nodiscard]] int dimension() const noexcept { return dimension_; }
  [[nodiscard]] double normalizing_constant() const noexcept { return constant_; }

  /// One-dimensional factor w_j(u).
  [[nodiscard]] double factor(double u) const noexcept;

  [[nodiscard]] double weight(std::span<const double> u) const;

 private:
  int exponent_;
  int dimension_;
  double constant_;
};

/// C_k = 1 / integral_{-1}^{1} (1 - u^2)^k du, computed by quadrature once per k.
double kernel_normalizing_constant(int exponent);

inline double kernel_weight(const ProductKernel& kernel, std::span<const double> u) {
  return kernel.weight(u);
}

}  // namespace resid_edf
