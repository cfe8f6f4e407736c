#include <gtest/gtest.h>

#include "triprod/orbit.hpp"

using namespace triprod;

TEST(LieN, MatchesDerivativeOfMakeN) {
  for (int d = 2; d <= 5; ++d) {
    const Dimension dim(d);
    for (int j = 0; j < d - 1; ++j) {
      Vector e = Vector::Zero(d - 1);
      e(j) = 1e-6;
      const Matrix fd = (make_n(e, dim).matrix() - make_n(Vector(-e), dim).matrix()) / 2e-6;
      EXPECT_LT((fd - lie_n(j, dim)).cwiseAbs().maxCoeff(), 1e-9);
    }
  }
}

TEST(TangentRank, ExplicitCommutators) {
  // d = 2: [H, X] = X spans n_R.
  const Dimension d2(2);
  const Matrix h = lie_h(d2), x = lie_n(0, d2);
  EXPECT_LT((h * x - x * h - x).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(am_tangent_rank(2, Vector::Ones(1)), 1);

  Vector e1(2);
  e1 << 1.0, 0.0;
  EXPECT_EQ(am_tangent_rank(3, e1), 2);

  Rng gen(1);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(4);
  for (int i = 0; i < 4; ++i) v(i) = normal(gen);
  EXPECT_EQ(am_tangent_rank(5, v.normalized()), 4);
}

TEST(TangentRank, IndependentOfBasePoint) {
  Rng gen(2);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int d = 2; d <= 6; ++d)
    for (int i = 0; i < 20; ++i) {
      Vector v(d - 1);
      for (int j = 0; j < d - 1; ++j) v(j) = normal(gen);
      EXPECT_EQ(am_tangent_rank(d, v), d - 1);
    }
}

TEST(TangentRank, RejectsBadInput) {
  EXPECT_THROW(am_tangent_rank(3, Vector::Zero(2)), DomainError);
  EXPECT_THROW(am_tangent_rank(3, Vector::Ones(3)), DomainError);
}

TEST(OpenOrbits, Counts) {
  const auto r2 = open_orbit_count(2);
  EXPECT_EQ(r2.open_orbit_count, 2);
  EXPECT_TRUE(r2.open_orbit_exists);
  EXPECT_EQ(r2.dim_n, 1);
  for (int d = 3; d <= 6; ++d) {
    const auto r = open_orbit_count(d);
    EXPECT_EQ(r.open_orbit_count, 1) << "d=" << d;
    EXPECT_EQ(r.tangent_rank, d - 1);
    EXPECT_EQ(r.open_orbit_exists, r.tangent_rank == r.dim_n);
  }
  EXPECT_THROW(open_orbit_count(1), DomainError);
}
