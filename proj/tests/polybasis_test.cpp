#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "resid_edf/errors.hpp"
#include "resid_edf/polybasis.hpp"

using namespace resid_edf;

namespace {

std::vector<std::vector<int>> exponents_of(const std::vector<MultiIndex>& set) {
  std::vector<std::vector<int>> out;
  for (const auto& i : set) out.push_back(i.exponents());
  return out;
}

long binomial(int n, int k) {
  long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

TEST(MultiIndexSet, DegreeOneDimensionOne) {
  EXPECT_EQ(exponents_of(multi_index_set(1, 1)), (std::vector<std::vector<int>>{{0}, {1}}));
}

TEST(MultiIndexSet, DegreeTwoDimensionTwo) {
  const std::vector<std::vector<int>> expected{{0, 0}, {1, 0}, {0, 1}, {2, 0}, {1, 1}, {0, 2}};
  EXPECT_EQ(exponents_of(multi_index_set(2, 2)), expected);
}

TEST(MultiIndexSet, DegreeZeroIsOnlyTheZeroIndex) {
  EXPECT_EQ(exponents_of(multi_index_set(0, 3)), (std::vector<std::vector<int>>{{0, 0, 0}}));
}

TEST(MultiIndexSet, SizeAndOrdering) {
  for (int m = 1; m <= 4; ++m) {
    for (int d = 0; d <= 4; ++d) {
      const auto set = multi_index_set(d, m);
      ASSERT_EQ(static_cast<long>(set.size()), binomial(m + d, d)) << "m=" << m << " d=" << d;
      EXPECT_EQ(set.front().order(), 0);
      for (std::size_t k = 1; k < set.size(); ++k) {
        EXPECT_LE(set[k - 1].order(), set[k].order());
        EXPECT_LE(set[k].order(), d);
        for (std::size_t l = 0; l < k; ++l) EXPECT_FALSE(set[l] == set[k]);
      }
    }
  }
}

TEST(MultiIndexSet, RejectsBadArguments) {
  EXPECT_THROW(multi_index_set(-1, 1), InvalidArgument);
  EXPECT_THROW(multi_index_set(1, 0), InvalidArgument);
  EXPECT_THROW(MultiIndex(std::vector<int>{1, -1}), InvalidArgument);
}

TEST(Psi, Examples) {
  const double x1[] = {3.0};
  EXPECT_DOUBLE_EQ(psi(MultiIndex({2}), x1), 4.5);
  const double x2[] = {2.0, 3.0};
  EXPECT_DOUBLE_EQ(psi(MultiIndex({1, 1}), x2), 6.0);
  const double x3[] = {-0.7, 12.0, 3.5};
  EXPECT_DOUBLE_EQ(psi(MultiIndex({0, 0, 0}), x3), 1.0);
  const double x4[] = {2.0, -1.0};
  EXPECT_DOUBLE_EQ(psi(MultiIndex({3, 2}), x4), 8.0 / 6.0 * 1.0 / 2.0);
}

TEST(Psi, DimensionMismatchThrows) {
  const double x[] = {1.0, 2.0};
  EXPECT_THROW(psi(MultiIndex({1}), x), InvalidArgument);
}

TEST(BasisSpec, EvaluateMatchesPsi) {
  const BasisSpec basis(3, 2);
  const double u[] = {0.3, -0.8};
  std::vector<double> out(basis.size());
  basis.evaluate(u, out);
  for (std::size_t k = 0; k < basis.size(); ++k) EXPECT_DOUBLE_EQ(out[k], psi(basis.indices()[k], u));
  std::vector<double> wrong(basis.size() + 1);
  EXPECT_THROW(basis.evaluate(u, wrong), InvalidArgument);
}

TEST(Kernel, NormalizingConstantMatchesClosedFormAndQuadrature) {
  EXPECT_NEAR(kernel_normalizing_constant(4), 315.0 / 256.0, 1e-13);
  for (int k = 1; k <= 8; ++k) {
    const double integral = oracle::simpson([k](double u) { return std::pow(1.0 - u * u, k); }, -1.0, 1.0, 4000);
    EXPECT_NEAR(kernel_normalizing_constant(k), 1.0 / integral, 1e-10) << "k=" << k;
  }
  EXPECT_THROW(kernel_normalizing_constant(0), InvalidArgument);
}

TEST(Kernel, Examples) {
  const ProductKernel kern(4, 1);
  EXPECT_NEAR(kern.factor(0.0), 1.23047, 1e-5);
  EXPECT_NEAR(kern.factor(0.5), 315.0 / 256.0 * std::pow(0.75, 4), 1e-14);
  EXPECT_NEAR(kern.factor(0.5), 0.38933, 1e-5);
  for (int k = 1; k <= 6; ++k) {
    const ProductKernel kk(k, 1);
    EXPECT_EQ(kk.factor(1.0), 0.0);
    EXPECT_EQ(kk.factor(-1.0), 0.0);
    EXPECT_EQ(kk.factor(1.5), 0.0);
  }
}

TEST(Kernel, DefaultExponent) {
  EXPECT_EQ(ProductKernel::for_dimension(1).exponent(), 4);
  EXPECT_EQ(ProductKernel::for_dimension(2).exponent(), 5);
  EXPECT_EQ(ProductKernel::for_dimension(3).exponent(), 6);
}

TEST(Kernel, FactorIntegratesToOne) {
  for (int k = 1; k <= 7; ++k) {
    const ProductKernel kern(k, 1);
    const double integral = oracle::simpson([&](double u) { return kern.factor(u); }, -1.0, 1.0, 4000);
    EXPECT_NEAR(integral, 1.0, 1e-10) << "k=" << k;
  }
}

TEST(Kernel, ProductOfFactors) {
  const ProductKernel kern(5, 2);
  const double u[] = {0.25, -0.6};
  EXPECT_DOUBLE_EQ(kern.weight(u), kern.factor(0.25) * kern.factor(-0.6));
  EXPECT_DOUBLE_EQ(kernel_weight(kern, u), kern.weight(u));
  const double outside[] = {0.25, 1.0};
  EXPECT_EQ(kern.weight(outside), 0.0);
  const double wrong[] = {0.1};
  EXPECT_THROW((void)kern.weight(wrong), InvalidArgument);

  const double integral = oracle::simpson(
      [&](double a) {
        return oracle::simpson([&](double b) {
          const double v[] = {a, b};
          return kern.weight(v);
        }, -1.0, 1.0, 400);
      },
      -1.0, 1.0, 400);
  EXPECT_NEAR(integral, 1.0, 1e-9);
}

TEST(Kernel, SmoothAtSupportBoundary) {
  // Derivatives of order < k vanish at |u| = 1, so one-sided difference
  // quotients of the first and second derivative shrink with the step.
  const ProductKernel kern(4, 1);
  for (double h : {1e-2, 1e-3}) {
    const double slope = (kern.factor(1.0) - kern.factor(1.0 - h)) / h;
    EXPECT_LT(std::fabs(slope), 50.0 * std::pow(h, 3));
  }
}
