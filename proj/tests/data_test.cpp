#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "resid_edf/data.hpp"
#include "resid_edf/errors.hpp"

using namespace resid_edf;

namespace {

struct Moments {
  double mean;
  double var;
};

Moments moments(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, ss / (n - 1.0)};
}

}  // namespace

TEST(Data, RegressionTruth) {
  EXPECT_NEAR(regression_truth(0.0), 1.0, 1e-15);
  EXPECT_NEAR(regression_truth(1.0), 1.0, 1e-15);
  EXPECT_NEAR(regression_truth(-1.0), -3.0, 1e-15);
}

TEST(Data, Propensity) {
  EXPECT_EQ(propensity(0.0), 0.5);
  EXPECT_NEAR(propensity(1.0), 0.73106, 1e-5);
  for (double x : {0.1, 0.7, 2.5}) EXPECT_NEAR(propensity(x) + propensity(-x), 1.0, 1e-15);
}

TEST(Data, LawNames) {
  for (ErrorLaw law : {ErrorLaw::Normal1, ErrorLaw::Normal2, ErrorLaw::Chisq1Centered, ErrorLaw::T4,
                       ErrorLaw::Laplace}) {
    EXPECT_EQ(parse_law(law_name(law)), law);
  }
  EXPECT_THROW(parse_law("cauchy"), InvalidArgument);
}

TEST(Data, GenerateIsDeterministic) {
  const SimDesign d{200, ErrorLaw::T4, 99, std::nullopt};
  const auto a = generate(d);
  const auto b = generate(d);
  EXPECT_EQ(a.sample.covariates(), b.sample.covariates());
  EXPECT_EQ(a.sample.responses(), b.sample.responses());
  EXPECT_EQ(a.errors, b.errors);
  const auto c = generate(SimDesign{200, ErrorLaw::T4, 100, std::nullopt});
  EXPECT_NE(a.sample.covariates(), c.sample.covariates());
}

TEST(Data, ResponsesFollowTheModel) {
  const auto sim = generate(SimDesign{500, ErrorLaw::Normal1, 5, std::nullopt});
  for (std::size_t j = 0; j < sim.sample.size(); ++j) {
    const double x = sim.sample.x(j)[0];
    EXPECT_GT(x, -1.0);
    EXPECT_LT(x, 1.0);
    if (sim.sample.y(j)) EXPECT_DOUBLE_EQ(*sim.sample.y(j), regression_truth(x) + sim.errors[j]);
  }
}

TEST(Data, MissingFractionIsOneHalf) {
  const auto sim = generate(SimDesign{100000, ErrorLaw::Normal1, 2024, std::nullopt});
  const double frac = static_cast<double>(sim.sample.complete_count()) / 1e5;
  EXPECT_GE(frac, 0.49);
  EXPECT_LE(frac, 0.51);
}

TEST(Data, IndicatorsDependOnSeedAndCovariatesOnly) {
  const SimDesign n01{300, ErrorLaw::Normal1, 77, std::nullopt};
  const SimDesign lap{300, ErrorLaw::Laplace, 77, std::nullopt};
  const auto a = generate(n01);
  const auto b = generate(lap);
  const auto regen = regenerate_indicators(n01, a.sample.covariates());
  for (std::size_t j = 0; j < a.sample.size(); ++j) {
    EXPECT_EQ(regen[j], a.sample.delta(j));
    EXPECT_EQ(a.sample.delta(j), b.sample.delta(j));
  }
}

TEST(Data, ConstantPropensity) {
  const auto all = generate(SimDesign{400, ErrorLaw::Normal1, 3, 1.0});
  EXPECT_EQ(all.sample.complete_count(), 400u);
  const auto none = generate(SimDesign{40, ErrorLaw::Normal1, 3, 0.0});
  EXPECT_EQ(none.sample.complete_count(), 0u);
  EXPECT_THROW(generate(SimDesign{40, ErrorLaw::Normal1, 3, 1.5}), InvalidArgument);
  EXPECT_THROW(generate(SimDesign{0, ErrorLaw::Normal1, 3, std::nullopt}), InvalidArgument);
}

TEST(Data, CenteredChiSquareMoments) {
  const auto sim = generate(SimDesign{100000, ErrorLaw::Chisq1Centered, 8, std::nullopt});
  const auto m = moments(sim.errors);
  EXPECT_GE(m.mean, -0.02);
  EXPECT_LE(m.mean, 0.02);
  EXPECT_GE(m.var, 1.95);
  EXPECT_LE(m.var, 2.05);
  for (double e : sim.errors) EXPECT_GE(e, -1.0);
}

TEST(Data, ErrorLawMoments) {
  // Tolerances are about 4 standard errors at n = 1e5 (the t4 variance
  // estimate has infinite fourth moment, so it only gets a loose band).
  struct Case {
    ErrorLaw law;
    double var_tol;
  };
  for (const Case c : {Case{ErrorLaw::Normal1, 0.02}, Case{ErrorLaw::Normal2, 0.04},
                       Case{ErrorLaw::Laplace, 0.06}, Case{ErrorLaw::T4, 0.25}}) {
    RngStream rng(41);
    std::vector<double> draws(100000);
    for (auto& v : draws) v = draw_error(c.law, rng);
    const auto m = moments(draws);
    EXPECT_NEAR(m.mean, 0.0, 4.0 * std::sqrt(law_variance(c.law) / 1e5)) << law_name(c.law);
    EXPECT_NEAR(m.var, law_variance(c.law), c.var_tol) << law_name(c.law);
  }
  EXPECT_EQ(law_variance(ErrorLaw::T4), 2.0);
  EXPECT_EQ(law_variance(ErrorLaw::Laplace), 2.0);
}

TEST(Rng, DeriveSeedSeparatesKeyPaths) {
  EXPECT_NE(derive_seed(1, {1, 2}), derive_seed(1, {2, 1}));
  EXPECT_NE(derive_seed(1, {1}), derive_seed(2, {1}));
  EXPECT_EQ(derive_seed(5, {3, 4}), derive_seed(5, {3, 4}));
  RngStream a(9);
  RngStream b(9);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a(), b());
  EXPECT_NE(RngStream(9).split(1)(), RngStream(9).split(2)());
  RngStream u(10);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform01();
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}
