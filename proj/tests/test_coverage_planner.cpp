#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "wsn/coverage_planner.hpp"
#include "wsn/errors.hpp"

using namespace wsn;

TEST(CoverageFraction, Examples) {
  EXPECT_EQ(coverage_fraction(0, 10), 0.0);
  // 1 - e^(-0.8 pi)
  const long double oracle = 1.0L - std::exp(-0.8L * 3.14159265358979323846L);
  EXPECT_NEAR(coverage_fraction(0.008, 10), static_cast<double>(oracle), 1e-12);
  EXPECT_NEAR(coverage_fraction(0.008, 10), 0.9190, 1e-4);
  EXPECT_GT(coverage_fraction(10, 10), 1 - 1e-12);
  EXPECT_LE(coverage_fraction(10, 10), 1.0);
}

TEST(CoverageFraction, Errors) {
  EXPECT_THROW(coverage_fraction(-0.1, 10), DomainError);
  EXPECT_THROW(coverage_fraction(0.1, 0), DomainError);
}

TEST(CoverageFraction, StrictlyIncreasing) {
  double prev = -1;
  for (int k = 0; k < 100; ++k) {
    const double f = coverage_fraction(k * 1e-4, 10);
    EXPECT_GT(f, prev);
    prev = f;
  }
  prev = -1;
  for (int k = 1; k < 100; ++k) {
    const double f = coverage_fraction(0.001, k * 0.5);
    EXPECT_GT(f, prev);
    prev = f;
  }
}

TEST(DensityForCoverage, Examples) {
  EXPECT_NEAR(density_for_coverage(0.9, 10), std::log(10.0) / (100 * std::numbers::pi), 1e-15);
  EXPECT_NEAR(density_for_coverage(0.9, 10), 0.007329, 1e-6);
  EXPECT_NEAR(density_for_coverage(1 - std::exp(-std::numbers::pi), 1), 1.0, 1e-12);
  EXPECT_NEAR(density_for_coverage(0.5, 10), 0.002206, 1e-6);
}

TEST(DensityForCoverage, Errors) {
  EXPECT_THROW(density_for_coverage(0, 10), DomainError);
  EXPECT_THROW(density_for_coverage(1, 10), DomainError);
  EXPECT_THROW(density_for_coverage(0.5, 0), DomainError);
}

TEST(DensityForCoverage, RoundTripAndMonotone) {
  double prev = 0;
  for (int k = 1; k < 1000; ++k) {
    const double beta = 0.01 + (0.999 - 0.01) * k / 1000.0;
    const double lambda = density_for_coverage(beta, 10);
    EXPECT_NEAR(coverage_fraction(lambda, 10), beta, 1e-12);
    EXPECT_GT(lambda, prev);
    prev = lambda;
  }
}

TEST(ActiveCount, Examples) {
  EXPECT_EQ(active_count_per_segment(0.008, 60, 10), 5);
  EXPECT_EQ(active_count_per_segment(3.0 / 600, 60, 10), 3);
  EXPECT_EQ(active_count_per_segment(0.00733, 60, 10), 4);
  EXPECT_EQ(active_count_per_segment(1e-6, 60, 10), 1);
  EXPECT_THROW(active_count_per_segment(0, 60, 10), DomainError);
}

TEST(PlanCoverage, Presets) {
  const AreaSpec area{60, 10, 10, 10, 0.9};
  const CoveragePlan rounded = plan_coverage(area, DensityRounding::three_decimals_up);
  EXPECT_DOUBLE_EQ(rounded.lambda, 0.008);
  EXPECT_EQ(rounded.s, 5);
  const CoveragePlan exact = plan_coverage(area, DensityRounding::exact);
  EXPECT_NEAR(exact.lambda, 0.007329, 1e-6);
  EXPECT_EQ(exact.s, 4);
}

TEST(AreaSpec, Validation) {
  EXPECT_NO_THROW((AreaSpec{60, 10, 10, 10, 0.9}.validate()));
  EXPECT_THROW((AreaSpec{0, 10, 10, 10, 0.9}.validate()), DomainError);
  EXPECT_THROW((AreaSpec{60, 10, 0, 10, 0.9}.validate()), DomainError);
  EXPECT_THROW((AreaSpec{60, 10, 10, 10, 1.0}.validate()), DomainError);
  EXPECT_DOUBLE_EQ((AreaSpec{60, 10, 10, 10, 0.9}.total_area()), 6000.0);
}

TEST(CoverageMonteCarlo, DeterministicAndBounded) {
  const AreaSpec area{60, 10, 10, 10, 0.9};
  const double a = coverage_monte_carlo(area, 5, 50, 3);
  EXPECT_EQ(a, coverage_monte_carlo(area, 5, 50, 3));
  EXPECT_GT(a, 0.0);
  EXPECT_LT(a, 1.0);
  EXPECT_LT(coverage_monte_carlo(area, 2, 50, 3), coverage_monte_carlo(area, 10, 50, 3));
}

// Sampled coverage of s = 5 uniform discs in the 60 x 10 strip against the
// disc-model prediction minus 0.05 slack. Border losses in a strip only 10 m
// wide exceed the slack, so this property does not hold.
TEST(CoverageMonteCarlo, WithinSlackOfDiscModel) {
  const AreaSpec area{60, 10, 10, 10, 0.9};
  const double sampled = coverage_monte_carlo(area, 5, 1000, 1);
  const double predicted = coverage_fraction(0.008, 10);
  EXPECT_GE(sampled, predicted - 0.05) << "sampled " << sampled << " predicted " << predicted;
}
