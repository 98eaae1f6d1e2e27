#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ovh;

namespace {

HPolyhedron box2(double lo0, double hi0, double lo1, double hi1) {
  Matrix A(4, 2);
  A << 1, 0, -1, 0, 0, 1, 0, -1;
  Vector b(4);
  b << hi0, -lo0, hi1, -lo1;
  return {A, b};
}

}  // namespace

TEST(BuildHrep, IdentityLayerActiveSide) {
  const MLPNetwork net({AffineMap(Matrix::Identity(1, 1), Vector::Zero(1))});
  const auto P = build_hrep(net, GlobalCodeword(Bits{1}, {1}), 1, BoundingBox::symmetric(1));
  EXPECT_TRUE(contains(P, Vector::Constant(1, 0.0)));
  EXPECT_TRUE(contains(P, Vector::Constant(1, 100.0)));
  EXPECT_FALSE(contains(P, Vector::Constant(1, -0.01)));
  EXPECT_FALSE(contains(P, Vector::Constant(1, 100.01)));
}

TEST(BuildHrep, AbsNetworkFirstLayer) {
  const auto net = oracle::abs_net();
  const auto P = build_hrep(net, GlobalCodeword(Bits{1, 0}, {2}), 1, BoundingBox::symmetric(1));
  EXPECT_TRUE(contains(P, Vector::Constant(1, 0.5)));
  EXPECT_TRUE(contains(P, Vector::Constant(1, 0.0)));
  EXPECT_FALSE(contains(P, Vector::Constant(1, -0.5)));
  EXPECT_EQ(P.constraints(), 2 + 2);
}

TEST(BuildHrep, RandomNetsContainTheirPoints) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int t = 0; t < 20; ++t) {
    const auto net = init_kaiming({3, 9, 7, 2}, rng());
    for (int p = 0; p < 10; ++p) {
      Vector x(3);
      x << n(rng), n(rng), n(rng);
      for (std::size_t l = 1; l <= net.depth(); ++l) {
        const auto P = build_hrep(net, global_codeword(net, x, l), l, BoundingBox::symmetric(3));
        EXPECT_TRUE(contains(P, x, 1e-9));
      }
    }
  }
}

TEST(BuildHrep, BoxDimensionMismatch) {
  EXPECT_THROW(build_hrep(oracle::abs_net(), GlobalCodeword(Bits{1, 0}, {2}), 1, BoundingBox::symmetric(2)),
               DimensionError);
}

TEST(Contains, Tolerance) {
  const auto P = box2(0, 1, 0, 1);
  Vector x(2);
  x << 1.0 + 1e-10, 0.5;
  EXPECT_TRUE(contains(P, x, 1e-9));
  EXPECT_FALSE(contains(P, x, 0.0));
}

TEST(Populate, AbsNetworkTwoRegions) {
  const auto net = oracle::abs_net();
  const Matrix x = oracle::grid_1d(-1, 1, 20);
  const auto d = populate_decomposition(net, x, 1, BoundingBox::symmetric(1));
  EXPECT_EQ(d.size(), 2u);
  EXPECT_EQ(d.region_of_point.size(), 20u);
  for (const auto& r : d.regions) {
    EXPECT_TRUE(std::is_sorted(r.points.begin(), r.points.end()));
    for (auto p : r.points) EXPECT_TRUE(contains(r.polyhedron, x.row(static_cast<Eigen::Index>(p)).transpose()));
  }
}

TEST(Populate, OriginIsItsOwnRegion) {
  const auto d = populate_decomposition(oracle::abs_net(), oracle::grid_1d(-1, 1, 21), 1, BoundingBox::symmetric(1));
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d.regions[d.region_of_point[10]].points, (std::vector<std::size_t>{10}));
  EXPECT_EQ(d.regions[d.region_of_point[10]].codeword.bits(), (Bits{1, 1}));
}

TEST(Populate, SymmetricHistogram) {
  const auto net = oracle::abs_net();
  Matrix x(10, 1);
  for (int i = 0; i < 5; ++i) {
    x(i, 0) = -1.0 + 0.2 * i;
    x(5 + i, 0) = 0.2 + 0.2 * i;
  }
  auto h = points_per_region_histogram(populate_decomposition(net, x, 1, BoundingBox::symmetric(1)));
  std::sort(h.begin(), h.end());
  EXPECT_EQ(h, (std::vector<std::size_t>{5, 5}));
}

TEST(Populate, PartitionsDataset) {
  const auto net = init_kaiming({2, 12, 12, 2}, 21);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2, 2);
  Matrix x(200, 2);
  for (Eigen::Index i = 0; i < 200; ++i) x(i, 0) = u(rng), x(i, 1) = u(rng);
  const auto d = populate_decomposition(net, x, 2, BoundingBox::symmetric(2));
  std::size_t total = 0;
  for (std::size_t r = 0; r < d.size(); ++r) {
    total += d.regions[r].points.size();
    for (auto p : d.regions[r].points) EXPECT_EQ(d.region_of_point[p], r);
    if (r > 0) {
      EXPECT_LT(d.regions[r - 1].points.front(), d.regions[r].points.front());
    }
  }
  EXPECT_EQ(total, 200u);
}

TEST(Volume, UnitSquare) {
  EXPECT_NEAR(estimate_volume(box2(0, 1, 0, 1), 20000, 1), 1.0, 0.02);
}

TEST(Volume, Triangle) {
  Matrix A(3, 2);
  A << -1, 0, 0, -1, 1, 1;
  Vector b(3);
  b << 0, 0, 1;
  EXPECT_NEAR(estimate_volume({A, b}, 20000, 1), 0.5, 0.02);
}

TEST(Volume, EmptyAndUnbounded) {
  EXPECT_EQ(estimate_volume(box2(1, 0, 0, 1), 1000, 1), 0.0);
  Matrix A(1, 2);
  A << 1, 0;
  EXPECT_THROW(estimate_volume({A, Vector::Ones(1)}, 1000, 1), NumericError);
}

TEST(Volume, SeedDeterministic) {
  Matrix A(3, 2);
  A << -1, 0, 0, -1, 1, 1;
  Vector b(3);
  b << 0, 0, 1;
  EXPECT_EQ(estimate_volume({A, b}, 500, 9), estimate_volume({A, b}, 500, 9));
}
