#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "topoid/rate.hpp"
#include "topoid/topology.hpp"

using namespace topoid;
using namespace topoid::testing;

namespace {
Matrix scalar(double x) { return Matrix::Constant(1, 1, x); }
Matrix diag2(double a, double b) { return Eigen::Vector2d(a, b).asDiagonal(); }
}  // namespace

TEST(Orientation, Signs) {
  EXPECT_EQ(orientation(Matrix::Identity(3, 3)), Orientation::preserving);
  EXPECT_EQ(orientation(diag2(1, -1)), Orientation::reversing);
  try {
    orientation(diag2(1, 0));
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_STREQ(e.what(), "orientation undefined for non-invertible map");
  }
}

TEST(TopologicallyEquivalent, Examples) {
  const Matrix half = 0.5 * Matrix::Identity(2, 2);
  EXPECT_TRUE(topologically_equivalent(half, half));
  EXPECT_TRUE(topologically_equivalent(half, diag2(0.3, 0.4)));
  EXPECT_FALSE(topologically_equivalent(diag2(0.5, -0.5), half));
}

TEST(TopologicallyEquivalent, RefusesOutsideStableIsomorphisms) {
  const Matrix half = 0.5 * Matrix::Identity(2, 2);
  EXPECT_THROW(topologically_equivalent(2.0 * Matrix::Identity(2, 2), half), std::invalid_argument);
  EXPECT_THROW(topologically_equivalent(half, diag2(0.5, 0.0)), std::invalid_argument);
  EXPECT_THROW(topologically_equivalent(half, Matrix::Identity(3, 3)), std::invalid_argument);
}

TEST(TopologicallyEquivalent, EquivalenceRelationLaws) {
  Rng rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 2 + trial % 3;
    const Matrix f = random_stable_invertible(rng, n);
    const Matrix g = random_stable_invertible(rng, n);
    const Matrix h = random_stable_invertible(rng, n);
    EXPECT_TRUE(topologically_equivalent(f, f));
    EXPECT_EQ(topologically_equivalent(f, g), topologically_equivalent(g, f));
    if (topologically_equivalent(f, g) && topologically_equivalent(g, h)) {
      EXPECT_TRUE(topologically_equivalent(f, h));
    }
  }
}

TEST(ScalarClass, SevenClasses) {
  const std::pair<double, int> table[] = {{-3.0, 1}, {-1.0, 2}, {-0.5, 3}, {0.0, 4},
                                          {0.5, 5},  {1.0, 6},  {2.0, 7}};
  for (const auto& [a, id] : table) {
    const auto cls = scalar_class(a);
    EXPECT_EQ(cls.id, id) << a;
    EXPECT_EQ(cls.degenerate(), id % 2 == 0) << a;
  }
  EXPECT_EQ(scalar_class(std::nextafter(-1.0, 0.0)).id, 3);
  EXPECT_EQ(scalar_class(std::nextafter(1.0, 2.0)).id, 7);
  EXPECT_EQ(scalar_class(-0.0).id, 4);
  EXPECT_THROW(scalar_class(NAN), std::invalid_argument);
}

TEST(ScalarConjugacy, Exponent) {
  EXPECT_EQ(scalar_conjugacy_exponent(2.0, 8.0), 3.0);
  EXPECT_EQ(scalar_conjugacy_exponent(0.5, 0.5), 1.0);
  EXPECT_NEAR(scalar_conjugacy_exponent(0.5, 0.25), 2.0, 1e-15);
  EXPECT_THROW(scalar_conjugacy_exponent(0.5, -0.5), std::invalid_argument);
  EXPECT_THROW(scalar_conjugacy_exponent(1.0, 1.0), std::invalid_argument);
  EXPECT_THROW(scalar_conjugacy_exponent(0.0, 0.0), std::invalid_argument);
}

TEST(ScalarConjugacy, Homeomorphism) {
  EXPECT_EQ(apply_scalar_homeomorphism(2.0, 3.0), 8.0);
  EXPECT_EQ(apply_scalar_homeomorphism(0.0, 0.3), 0.0);
  EXPECT_EQ(apply_scalar_homeomorphism(-2.0, 3.0), -8.0);
  EXPECT_THROW(apply_scalar_homeomorphism(1.0, 0.0), std::invalid_argument);

  Rng rng(42);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng);
    // g ∘ φ = φ ∘ f for f(x) = 2x, g(y) = 8y.
    EXPECT_LE(rel_err(apply_scalar_homeomorphism(2.0 * x, 3.0), 8.0 * apply_scalar_homeomorphism(x, 3.0)),
              1e-12);
    const double c = 0.25 + std::abs(u(rng));
    EXPECT_NEAR(apply_scalar_homeomorphism(apply_scalar_homeomorphism(x, c), 1.0 / c), x,
                1e-12 * (1 + std::abs(x)));
  }
  // Same property for a contracting negative pair: a = −0.5, b = −0.125.
  const double c = scalar_conjugacy_exponent(-0.5, -0.125);
  for (int i = 0; i < 100; ++i) {
    const double x = u(rng);
    EXPECT_LE(rel_err(apply_scalar_homeomorphism(-0.5 * x, c), -0.125 * apply_scalar_homeomorphism(x, c)),
              1e-12);
  }
}

TEST(ReverseIProjection, ScalarExamples) {
  EXPECT_NEAR(reverse_I_projection(scalar(0.5), scalar(1.0))(0, 0), 0.5, 1e-6);
  EXPECT_NEAR(reverse_I_projection(scalar(2.0), scalar(1.0))(0, 0), 0.5, 1e-3);
  const double neg = reverse_I_projection(scalar(-3.0), scalar(1.0))(0, 0);
  EXPECT_NEAR(neg, -1.0 / 3.0, 1e-3);
  EXPECT_LT(neg, 0.0);
  EXPECT_THROW(reverse_I_projection(scalar(2.0), scalar(1.0), 0.0), std::invalid_argument);
  EXPECT_THROW(reverse_I_projection(scalar(2.0), scalar(-1.0)), std::invalid_argument);
}

TEST(ReverseIProjection, MatchesScalarGridSearch) {
  for (double tp : {1.5, 2.0, 5.0, -2.0}) {
    const double grid = scalar_projection_grid(tp);
    EXPECT_NEAR(grid, 1.0 / tp, 1e-4);
    EXPECT_NEAR(reverse_I_projection(scalar(tp), scalar(1.0))(0, 0), grid, 1e-3) << tp;
  }
}

TEST(ReverseIProjection, StableFixedPointsAsDeltaShrinks) {
  Rng rng(43);
  const Matrix theta = random_stable(rng, 3, 0.8);
  double prev = INFINITY;
  for (double delta : {1e-3, 1e-6, 1e-9}) {
    const double gap = (reverse_I_projection(theta, Matrix::Identity(3, 3), delta) - theta).norm();
    EXPECT_LE(gap, prev);
    prev = gap;
  }
  EXPECT_LE(prev, 1e-6);
}

TEST(ReverseIProjection, StableAndOrientationPreserving) {
  Rng rng(44);
  for (int trial = 0; trial < 200; ++trial) {
    const Eigen::Index n = 2 + trial % 2;
    const Matrix tp = random_uniform(rng, n, n, -2, 2);
    const Matrix sw = random_spd(rng, n);
    const Matrix p = reverse_I_projection(tp, sw);
    EXPECT_LT(matops::spectral_radius(p), 1.0);
    if (std::abs(tp.determinant()) > 1e-6) {
      EXPECT_EQ(matops::det_sign(p), matops::det_sign(tp));
    }
  }
}

TEST(ReverseIProjection, LocallyMinimizesRateFunction) {
  Rng rng(45);
  int tested = 0;
  while (tested < 20) {
    const Matrix tp = random_uniform(rng, 2, 2, -2, 2);
    if (matops::spectral_radius(tp) <= 1.0) continue;
    ++tested;
    const Matrix sw = Matrix::Identity(2, 2);
    const Matrix p = reverse_I_projection(tp, sw);
    const double base = rate_function(tp, p, sw);
    const double radius = 1e-2 * (1.0 - matops::spectral_radius(p));
    for (int k = 0; k < 100; ++k) {
      Matrix e = random_gaussian(rng, 2, 2);
      e *= radius / e.norm();
      if (!matops::is_stable(p + e)) continue;
      EXPECT_LE(base, rate_function(tp, p + e, sw) + 1e-12 * base) << tp;
    }
  }
}
