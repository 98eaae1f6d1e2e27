#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace ovh;

namespace {

std::vector<std::vector<std::size_t>> classes_of(const MLPNetwork& net, const Matrix& x, double delta,
                                                 unsigned jobs = 1) {
  OverlapOptions opt;
  opt.delta = delta;
  opt.jobs = jobs;
  return overlap_decomposition(net, net.depth(), x, BoundingBox::symmetric(x.cols()), opt).classes;
}

}  // namespace

TEST(Overlap, AbsNetworkFourPoints) {
  Matrix x(4, 1);
  x << -1, -0.5, 0.5, 1;
  EXPECT_EQ(classes_of(oracle::abs_net(), x, 1.0), (std::vector<std::vector<std::size_t>>{{0, 1, 2, 3}}));
}

TEST(Overlap, AbsNetworkGrid) {
  const Matrix x = oracle::grid_1d(-1, 1, 21);
  const auto c = classes_of(oracle::abs_net(), x, 1.0);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].size(), 20u);  // x = 0 has no mirror point on the other side
}

TEST(Overlap, PairsMatchCollisionOracle) {
  const auto net = oracle::abs_net();
  const Matrix x = oracle::grid_1d(-1, 1, 21);
  const auto d = populate_decomposition(net, x, 2, BoundingBox::symmetric(1));
  auto got = detect_overlap_pairs(net, 2, d, x);
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, oracle::collision_pairs(net, 2, d, x, 1.0));
}

TEST(Overlap, InjectiveNetworkHasNoClasses) {
  Matrix w(2, 2);
  w << 1, 0.3, -0.2, 1;
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix x(30, 2);
  for (Eigen::Index i = 0; i < 30; ++i) x(i, 0) = u(rng), x(i, 1) = u(rng);
  const MLPNetwork affine({AffineMap(w, Vector::Zero(2))});
  EXPECT_TRUE(classes_of(affine, x, 1.0).empty());
}

TEST(Overlap, TinyDeltaFiltersEverything) {
  Matrix x(4, 1);
  x << -1, -0.5, 0.45, 0.95;
  EXPECT_TRUE(classes_of(oracle::abs_net(), x, 1e-6).empty());
}

TEST(Overlap, RejectsBadDelta) {
  EXPECT_THROW(classes_of(oracle::abs_net(), oracle::grid_1d(-1, 1, 5), 0.0), std::invalid_argument);
}

TEST(Merge, ConnectedComponents) {
  const std::vector<PointPair> pairs{{0, 3}, {3, 5}, {1, 2}, {7, 8}, {8, 7}};
  const auto od = merge_to_decomposition(pairs);
  EXPECT_EQ(od.classes, oracle::components(9, pairs));
  EXPECT_EQ(od.classes, (std::vector<std::vector<std::size_t>>{{0, 3, 5}, {1, 2}, {7, 8}}));
  EXPECT_TRUE(merge_to_decomposition({}).empty());
}

TEST(Merge, RandomGraphsMatchComponents) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 2 + rng() % 30;
    std::vector<PointPair> pairs;
    for (std::size_t e = rng() % 25; e > 0; --e) {
      const std::size_t a = rng() % n, b = rng() % n;
      if (a != b) pairs.emplace_back(std::min(a, b), std::max(a, b));
    }
    EXPECT_EQ(merge_to_decomposition(pairs).classes, oracle::components(n, pairs));
  }
}

TEST(Merge, LabelsAndRegions) {
  const auto net = oracle::abs_net();
  Matrix x(5, 1);
  x << -1, -0.5, 0, 0.5, 1;
  const auto od = overlap_decomposition(net, 2, x, BoundingBox::symmetric(1));
  EXPECT_EQ(od.labels(5), (std::vector<long>{0, 0, -1, 0, 0}));
  ASSERT_EQ(od.class_regions.size(), 1u);
  EXPECT_EQ(od.class_regions[0].size(), 2u);
}

TEST(Overlap, JobCountDoesNotChangeResult) {
  const auto net = init_kaiming({2, 10, 10, 1}, 12);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix x(60, 2);
  for (Eigen::Index i = 0; i < 60; ++i) x(i, 0) = u(rng), x(i, 1) = u(rng);
  const auto one = classes_of(net, x, 0.5, 1);
  EXPECT_EQ(one, classes_of(net, x, 0.5, 3));
  EXPECT_FALSE(one.empty());
}

TEST(Overlap, RandomNetsMatchCollisionOracle) {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 10; ++t) {
    const auto net = init_kaiming({2, 6, 6, 1}, rng());
    Matrix x(25, 2);
    for (Eigen::Index i = 0; i < 25; ++i) x(i, 0) = u(rng), x(i, 1) = u(rng);
    const auto d = populate_decomposition(net, x, 3, BoundingBox::symmetric(2));
    auto got = detect_overlap_pairs(net, 3, d, x, {0.3});
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, oracle::collision_pairs(net, 3, d, x, 0.3)) << "trial " << t;
  }
}

TEST(Statistics, AbsNetworkOneClass) {
  const auto net = oracle::abs_net();
  Matrix x(4, 1);
  x << -1, -0.5, 0.5, 1;
  const auto d = populate_decomposition(net, x, 2, BoundingBox::symmetric(1));
  const auto od = overlap_decomposition(net, 2, d, x);
  const auto s = overlap_statistics(od, d, 4000, 0);
  EXPECT_EQ(s.n_classes, 1u);
  EXPECT_EQ(s.class_sizes, (std::vector<std::size_t>{4}));
  ASSERT_EQ(s.region_volumes[0].size(), 2u);
  for (double v : s.region_volumes[0]) EXPECT_NEAR(v, 100.0, 1e-9);
}
