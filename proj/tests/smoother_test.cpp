#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "resid_edf/errors.hpp"
#include "resid_edf/smoother.hpp"

using namespace resid_edf;

namespace {

MarSample random_sample(std::mt19937_64& gen, int m, std::size_t n, double missing_prob,
                        const std::function<double(std::span<const double>)>& f) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::bernoulli_distribution miss(missing_prob);
  MarSample s(m);
  std::vector<double> x(static_cast<std::size_t>(m));
  for (std::size_t j = 0; j < n; ++j) {
    for (auto& v : x) v = unif(gen);
    if (miss(gen)) {
      s.add_row(x, std::nullopt);
    } else {
      s.add_row(x, f(x));
    }
  }
  return s;
}

}  // namespace

TEST(BandwidthRule, Examples) {
  EXPECT_NEAR(bandwidth_rule(100, 1.25), 0.26983, 1e-5);
  EXPECT_NEAR(bandwidth_rule(50, 1.25), 0.33424, 1e-5);
  EXPECT_NEAR(bandwidth_rule(50, 1.25, 0.2), 1.25 * std::pow(50.0 * std::log(50.0), -0.2), 1e-15);
  EXPECT_THROW(bandwidth_rule(50, 0.0), InvalidArgument);
  EXPECT_THROW(bandwidth_rule(1, 1.25), InvalidArgument);
}

TEST(Smoother, LinearReproduction) {
  std::mt19937_64 gen(7);
  const auto s = random_sample(gen, 1, 80, 0.0, [](auto x) { return 2.0 + 3.0 * x[0]; });
  const auto fit = fit_local_poly(s, 1, ProductKernel(4, 1), 0.3, DomainBox::cube(1, -1, 1));
  for (double x = -0.95; x <= 0.95; x += 0.05) EXPECT_NEAR(fit.evaluate(x), 2.0 + 3.0 * x, 1e-8);
}

TEST(Smoother, ConstantResponsesWithMissingRows) {
  std::mt19937_64 gen(8);
  const auto s = random_sample(gen, 1, 60, 0.4, [](auto) { return 4.25; });
  const auto fit = fit_local_poly(s, 1, ProductKernel(4, 1), 0.3, DomainBox::cube(1, -1, 1));
  for (double x = -1.0; x <= 1.0; x += 0.1) EXPECT_NEAR(fit.evaluate(x), 4.25, 1e-10);
}

TEST(Smoother, SingleCompleteCase) {
  MarSample s(1);
  const double x0[] = {0.2};
  const double x1[] = {-0.5};
  s.add_row(x0, 1.75);
  s.add_row(x1, std::nullopt);
  const auto fit = fit_local_poly(s, 0, ProductKernel(4, 1), 0.1, DomainBox::cube(1, -1, 1));
  EXPECT_DOUBLE_EQ(fit.evaluate(0.2), 1.75);
}

TEST(Smoother, HandBuiltDatasetMatchesNormalEquations) {
  const std::vector<double> xs{-0.8, -0.3, 0.1, 0.4, 0.9};
  const std::vector<double> ys{1.2, -0.4, 0.7, 2.1, 0.3};
  MarSample s(1);
  for (std::size_t j = 0; j < xs.size(); ++j) s.add_row(std::span(&xs[j], 1), ys[j]);
  const ProductKernel kern(4, 1);
  const double c = 0.8;
  const auto fit = fit_local_poly(s, 1, kern, c, DomainBox::cube(1, -1, 1));
  for (double x : {-0.6, -0.2, 0.0, 0.25, 0.5}) {
    std::vector<std::vector<double>> rows;
    std::vector<double> w;
    std::vector<double> y;
    for (std::size_t j = 0; j < xs.size(); ++j) {
      const double u = (xs[j] - x) / c;
      const double wj = std::fabs(u) < 1 ? 315.0 / 256.0 * std::pow(1 - u * u, 4) : 0.0;
      if (wj == 0.0) continue;
      rows.push_back({1.0, u});
      w.push_back(wj);
      y.push_back(ys[j]);
    }
    const auto beta = oracle::weighted_normal_equations(rows, w, y);
    EXPECT_NEAR(fit.evaluate(x), static_cast<double>(beta[0]), 1e-12) << "x=" << x;
  }

  const auto res = residuals_complete_case(fit, s);
  ASSERT_EQ(res.size(), 5u);
  for (std::size_t j = 0; j < 5; ++j) {
    EXPECT_EQ(res[j].index, j);
    EXPECT_DOUBLE_EQ(res[j].residual, ys[j] - fit.evaluate(xs[j]));
  }
}

TEST(Smoother, ResidualsOnlyForCompleteCases) {
  const std::vector<double> cov{-0.5, 0.0, 0.5};
  MarSample s(1, cov, {1.0, std::nullopt, 2.0});
  const auto fit = fit_local_poly(s, 1, ProductKernel(4, 1), 2.0, DomainBox::cube(1, -1, 1));
  const auto res = residuals_complete_case(fit, s);
  ASSERT_EQ(res.size(), 2u);
  EXPECT_EQ(res[0].index, 0u);
  EXPECT_EQ(res[1].index, 2u);
  EXPECT_NEAR(res[0].residual, 0.0, 1e-12);
  EXPECT_NEAR(res[1].residual, 0.0, 1e-12);
}

TEST(Smoother, PolynomialReproductionProperty) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_real_distribution<double> query(-0.9, 0.9);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + trial % 2;
    const int d = (trial / 2) % 3;
    const BasisSpec basis(d, m);
    std::vector<double> a(basis.size());
    for (auto& v : a) v = coef(gen);
    auto poly = [&](std::span<const double> x) {
      std::vector<double> row(basis.size());
      basis.evaluate(x, row);
      return std::inner_product(a.begin(), a.end(), row.begin(), 0.0);
    };
    const auto s = random_sample(gen, m, m == 1 ? 60 : 300, 0.3, poly);
    const auto fit = fit_local_poly(s, d, ProductKernel::for_dimension(m), m == 1 ? 0.35 : 0.6,
                                    DomainBox::cube(m, -1, 1));
    for (int q = 0; q < 5; ++q) {
      std::vector<double> x(static_cast<std::size_t>(m));
      for (auto& v : x) v = query(gen);
      ASSERT_NEAR(fit.evaluate(x), poly(x), 1e-8) << "trial " << trial;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 500);
}

TEST(Smoother, TransferIdentityIsBitExact) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> query(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + trial % 2;
    const auto s = random_sample(gen, m, 120, 0.0, [&](auto x) {
      return std::sin(3.0 * x[0]) + (x.size() > 1 ? x[1] * x[1] : 0.0) + std::normal_distribution<>(0, 0.3)(gen);
    });
    std::vector<double> y;
    for (const auto& r : s.responses()) y.push_back(*r);
    const ProductKernel kern = ProductKernel::for_dimension(m);
    const auto cc = fit_local_poly(s, 1, kern, 0.5, DomainBox::cube(m, -1, 1));
    const auto full = fit_local_poly_full(s.covariates(), y, 1, kern, 0.5, DomainBox::cube(m, -1, 1));
    for (int q = 0; q < 5; ++q) {
      std::vector<double> x(static_cast<std::size_t>(m));
      for (auto& v : x) v = query(gen);
      ASSERT_EQ(std::bit_cast<std::uint64_t>(cc.evaluate(x)), std::bit_cast<std::uint64_t>(full.evaluate(x)));
    }
  }
}

TEST(Smoother, PermutationInvariance) {
  std::mt19937_64 gen(13);
  const auto s = random_sample(gen, 1, 100, 0.3, [&](auto x) {
    return std::cos(2.0 * x[0]) + std::normal_distribution<>(0, 0.5)(gen);
  });
  std::vector<std::size_t> perm(s.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), gen);
  MarSample shuffled(1);
  for (std::size_t j : perm) shuffled.add_row(s.x(j), s.y(j));
  const auto a = fit_local_poly(s, 1, ProductKernel(4, 1), 0.3, DomainBox::cube(1, -1, 1));
  const auto b = fit_local_poly(shuffled, 1, ProductKernel(4, 1), 0.3, DomainBox::cube(1, -1, 1));
  for (double x = -1.0; x <= 1.0; x += 0.05) EXPECT_NEAR(a.evaluate(x), b.evaluate(x), 1e-12);
}

TEST(Smoother, LinearInResponses) {
  std::mt19937_64 gen(14);
  std::normal_distribution<double> z;
  const std::size_t n = 90;
  std::vector<double> cov(n);
  std::vector<double> y1(n), y2(n), ysum(n);
  for (std::size_t j = 0; j < n; ++j) {
    cov[j] = std::uniform_real_distribution<double>(-1, 1)(gen);
    y1[j] = z(gen);
    y2[j] = z(gen);
    ysum[j] = y1[j] + y2[j];
  }
  const ProductKernel kern(4, 1);
  const auto box = DomainBox::cube(1, -1, 1);
  const auto f1 = fit_local_poly_full(cov, y1, 2, kern, 0.4, box);
  const auto f2 = fit_local_poly_full(cov, y2, 2, kern, 0.4, box);
  const auto fs = fit_local_poly_full(cov, ysum, 2, kern, 0.4, box);
  for (double x = -1.0; x <= 1.0; x += 0.1) {
    EXPECT_NEAR(fs.evaluate(x), f1.evaluate(x) + f2.evaluate(x), 1e-10);
  }
}

TEST(Smoother, BandwidthScaleConventions) {
  // On [-1, 1] the unit-cube window with bandwidth c equals the covariate
  // window with bandwidth 2c.
  std::mt19937_64 gen(15);
  std::normal_distribution<double> noise(0.0, 0.2);
  const auto s = random_sample(gen, 1, 100, 0.2, [&](auto x) { return x[0] * x[0] + noise(gen); });
  SmootherOptions cube;
  cube.bandwidth_scale = BandwidthScale::UnitCube;
  const auto a = fit_local_poly(s, 1, ProductKernel(4, 1), 0.15, DomainBox::cube(1, -1, 1), cube);
  const auto b = fit_local_poly(s, 1, ProductKernel(4, 1), 0.3, DomainBox::cube(1, -1, 1));
  for (double x = -1.0; x <= 1.0; x += 0.1) EXPECT_NEAR(a.evaluate(x), b.evaluate(x), 1e-12);
}

TEST(Smoother, SparseRegionInflatesBandwidth) {
  // Two clusters far apart; a query between them needs inflation.
  MarSample s(1);
  for (double x : {-1.0, -0.95, -0.9, 0.9, 0.95, 1.0}) s.add_row(std::span(&x, 1), 2.0 * x);
  const auto fit = fit_local_poly(s, 1, ProductKernel(4, 1), 0.1, DomainBox::cube(1, -1, 1));
  EXPECT_NEAR(fit.evaluate(0.0), 0.0, 1e-10);
  EXPECT_NEAR(fit.evaluate(-0.5), -1.0, 1e-10);
}

TEST(Smoother, EmptyWindowAfterInflationCap) {
  MarSample s(1);
  for (double x : {-1.0, -0.99, -0.98}) s.add_row(std::span(&x, 1), x);
  SmootherOptions opts;
  opts.max_inflations = 2;
  const auto fit = fit_local_poly(s, 1, ProductKernel(4, 1), 0.05, DomainBox::cube(1, -1, 1), opts);
  EXPECT_THROW((void)fit.evaluate(0.9), EmptyWindow);
}

TEST(Smoother, RankDeficientAfterInflationCap) {
  // All complete cases share one covariate value: a local line is never
  // identified.
  MarSample s(1);
  for (double y : {1.0, 2.0, 3.0}) {
    const double x = 0.0;
    s.add_row(std::span(&x, 1), y);
  }
  const auto fit = fit_local_poly(s, 1, ProductKernel(4, 1), 0.2, DomainBox::cube(1, -1, 1));
  EXPECT_THROW((void)fit.evaluate(0.0), RankDeficient);
}

TEST(Smoother, ErrorPaths) {
  MarSample s(1);
  const double x = 0.0;
  s.add_row(std::span(&x, 1), 1.0);
  s.add_row(std::span(&x, 1), std::nullopt);
  const ProductKernel kern(4, 1);
  EXPECT_THROW(fit_local_poly(s, 1, kern, 0.2, DomainBox::cube(1, -1, 1)), InsufficientData);
  EXPECT_THROW(fit_local_poly(s, 0, kern, 0.0, DomainBox::cube(1, -1, 1)), InvalidArgument);
  EXPECT_THROW(fit_local_poly(s, 0, ProductKernel(4, 2), 0.2, DomainBox::cube(1, -1, 1)), InvalidArgument);
  const auto fit = fit_local_poly(s, 0, kern, 0.2, DomainBox::cube(1, -1, 1));
  EXPECT_THROW((void)fit.evaluate(1.5), InvalidArgument);
  const double two[] = {0.0, 0.0};
  EXPECT_THROW((void)fit.evaluate(two), InvalidArgument);
  EXPECT_THROW(DomainBox::bounding(s), InvalidArgument);
  EXPECT_THROW(DomainBox::cube(1, 1.0, 1.0), InvalidArgument);
}

TEST(Smoother, BoundingBoxUsesAllRows) {
  const std::vector<double> cov{-0.5, 0.75, 0.1};
  MarSample s(1, cov, {1.0, std::nullopt, 2.0});
  const auto box = DomainBox::bounding(s);
  EXPECT_EQ(box.lo[0], -0.5);
  EXPECT_EQ(box.hi[0], 0.75);
  const auto fit = fit_local_poly(s, 0, ProductKernel(4, 1), 5.0);
  EXPECT_NO_THROW((void)fit.evaluate(0.75));
}

TEST(Smoother, FittedValuesCoverEveryRow) {
  const std::vector<double> cov{-0.5, 0.0, 0.5};
  MarSample s(1, cov, {1.0, std::nullopt, 2.0});
  const auto fit = fit_local_poly(s, 1, ProductKernel(4, 1), 2.0, DomainBox::cube(1, -1, 1));
  const auto fitted = fitted_values(fit, s);
  ASSERT_EQ(fitted.size(), 3u);
  EXPECT_NEAR(fitted[1], 1.5, 1e-12);
}
