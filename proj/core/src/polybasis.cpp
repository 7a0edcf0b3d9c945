#include "resid_edf/polybasis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "resid_edf/errors.hpp"

namespace resid_edf {

MultiIndex::MultiIndex(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  if (exponents_.empty()) {
    throw InvalidArgument("MultiIndex: dimension must be >= 1");
  }
  for (int e : exponents_) {
    if (e < 0) {
      throw InvalidArgument("MultiIndex: exponents must be nonnegative");
    }
  }
  order_ = std::accumulate(exponents_.begin(), exponents_.end(), 0);
}

namespace {

// Appends every exponent vector with the given total order, largest
// leading exponent first.
void append_order(int remaining, std::size_t position, std::vector<int>& current,
                  std::vector<MultiIndex>& out) {
  if (position + 1 == current.size()) {
    current[position] = remaining;
    out.emplace_back(current);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[position] = e;
    append_order(remaining - e, position + 1, current, out);
  }
}

double factorial(int k) {
  double r = 1.0;
  for (int i = 2; i <= k; ++i) r *= i;
  return r;
}

}  // namespace

std::vector<MultiIndex> multi_index_set(int degree, int dimension) {
  if (degree < 0) throw InvalidArgument("multi_index_set: degree must be >= 0");
  if (dimension < 1) throw InvalidArgument("multi_index_set: dimension must be >= 1");
  std::vector<MultiIndex> out;
  std::vector<int> current(static_cast<std::size_t>(dimension), 0);
  for (int order = 0; order <= degree; ++order) {
    append_order(order, 0, current, out);
  }
  return out;
}

double psi(const MultiIndex& index, std::span<const double> x) {
  if (index.dimension() != x.size()) {
    throw InvalidArgument("psi: multi-index has dimension " + std::to_string(index.dimension()) +
                          " but point has dimension " + std::to_string(x.size()));
  }
  double value = 1.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const int e = index[j];
    if (e == 0) continue;
    value *= std::pow(x[j], e) / factorial(e);
  }
  return value;
}

BasisSpec::BasisSpec(int degree, int dimension)
    : degree_(degree), dimension_(dimension), indices_(multi_index_set(degree, dimension)) {}

void BasisSpec::evaluate(std::span<const double> u, std::span<double> out) const {
  if (out.size() != indices_.size()) {
    throw InvalidArgument("BasisSpec::evaluate: output span has wrong size");
  }
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    out[i] = psi(indices_[i], u);
  }
}

double kernel_normalizing_constant(int exponent) {
  if (exponent < 1) throw InvalidArgument("kernel exponent must be >= 1");
  static std::mutex mutex;
  static std::map<int, double> cache;
  std::lock_guard lock(mutex);
  if (auto it = cache.find(exponent); it != cache.end()) return it->second;

  auto integrand = [exponent](double u) { return std::pow(1.0 - u * u, exponent); };
  double error = 0.0;
  const double mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      integrand, -1.0, 1.0, 15, 1e-15, &error);
  if (!(mass > 0.0) || error > 1e-12) {
    throw IntegrationFailure("kernel_normalizing_constant: quadrature did not converge");
  }
  const double c = 1.0 / mass;
  cache.emplace(exponent, c);
  return c;
}

ProductKernel::ProductKernel(int exponent, int dimension)
    : exponent_(exponent), dimension_(dimension), constant_(kernel_normalizing_constant(exponent)) {
  if (dimension < 1) throw InvalidArgument("ProductKernel: dimension must be >= 1");
}

ProductKernel ProductKernel::for_dimension(int dimension) {
  return ProductKernel(dimension + 3, dimension);
}

double ProductKernel::factor(double u) const noexcept {
  if (!(std::abs(u) < 1.0)) return 0.0;
  double base = 1.0 - u * u;
  double p = 1.0;
  for (int e = exponent_; e > 0; e >>= 1) {
    if (e & 1) p *= base;
    base *= base;
  }
  return constant_ * p;
}

double ProductKernel::weight(std::span<const double> u) const {
  if (u.size() != static_cast<std::size_t>(dimension_)) {
    throw InvalidArgument("ProductKernel::weight: dimension mismatch");
  }
  double w = 1.0;
  for (double uj : u) {
    w *= factor(uj);
    if (w == 0.0) return 0.0;
  }
  return w;
}

}  // namespace resid_edf
