#include "ovh/ovh.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ovh;

namespace {

Matrix grid(std::size_t n) {
  Matrix x(static_cast<Eigen::Index>(n), 1);
  for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i), 0) = -1.0 + 2.0 * double(i) / double(n - 1);
  return x;
}

}  // namespace

TEST(Train, IdentityFitDescends) {
  const Matrix x = grid(21);
  TrainConfig cfg;
  cfg.learning_rate = 1e-2;
  cfg.epochs = 200;
  const auto r = train(init_kaiming({1, 8, 1}, 0), x, x, cfg);
  ASSERT_EQ(r.loss_history.size(), 200u);
  EXPECT_LT(r.final_loss, r.loss_history.front());
}

TEST(Train, SingleAffineLayerFitsIdentity) {
  const Matrix x = grid(11);
  TrainConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.epochs = 500;
  cfg.optimizer = Optimizer::GradientDescent;
  const auto r = train(MLPNetwork({AffineMap(Matrix::Constant(1, 1, 0.3), Vector::Zero(1))}), x, x, cfg);
  EXPECT_LT(r.final_loss, 1e-6);
}

TEST(Train, StopsOnLossThreshold) {
  const Matrix x = grid(11);
  TrainConfig cfg;
  cfg.learning_rate = 0.5;
  cfg.epochs = 10000;
  cfg.optimizer = Optimizer::GradientDescent;
  cfg.stop = StopCriterion{StopCriterion::Kind::LossBelow, 1e-4};
  const auto r = train(MLPNetwork({AffineMap(Matrix::Constant(1, 1, 0.3), Vector::Zero(1))}), x, x, cfg);
  EXPECT_TRUE(r.stopped_early);
  EXPECT_LT(r.loss_history.size(), 10000u);
  EXPECT_LT(r.loss_history.back(), 1e-4);
}

TEST(Train, CrossEntropySeparatesClasses) {
  Matrix x(40, 1), y(40, 1);
  for (int i = 0; i < 40; ++i) {
    x(i, 0) = -1.0 + 2.0 * i / 39.0;
    y(i, 0) = x(i, 0) > 0 ? 1 : 0;
  }
  TrainConfig cfg;
  cfg.loss = Loss::CrossEntropy;
  cfg.learning_rate = 1e-2;
  cfg.epochs = 2000;
  cfg.stop = StopCriterion{StopCriterion::Kind::AccuracyAbove, 0.999};
  const auto r = train(init_kaiming({1, 8, 2}, 3), x, y, cfg);
  EXPECT_TRUE(r.stopped_early);
  EXPECT_GT(r.final_accuracy, 0.999);
  const auto pred = predict_classes(r.network, x);
  for (int i = 0; i < 40; ++i) EXPECT_EQ(pred[static_cast<std::size_t>(i)], y(i, 0));
}

TEST(Train, OneHotTargetsMatchIndexTargets) {
  Matrix x(6, 1), idx(6, 1), onehot = Matrix::Zero(6, 2);
  for (int i = 0; i < 6; ++i) {
    x(i, 0) = i;
    idx(i, 0) = i % 2;
    onehot(i, i % 2) = 1.0;
  }
  TrainConfig cfg;
  cfg.loss = Loss::CrossEntropy;
  cfg.epochs = 5;
  const auto a = train(init_kaiming({1, 4, 2}, 1), x, idx, cfg);
  const auto b = train(init_kaiming({1, 4, 2}, 1), x, onehot, cfg);
  EXPECT_EQ(a.loss_history, b.loss_history);
}

TEST(Train, DivergenceAbortsWithNumericError) {
  const Matrix x = grid(11) * 1e3;
  TrainConfig cfg;
  cfg.learning_rate = 1e3;
  cfg.epochs = 200;
  cfg.optimizer = Optimizer::GradientDescent;
  EXPECT_THROW(train(init_kaiming({1, 16, 16, 1}, 0), x, x, cfg), NumericError);
}

TEST(Train, RejectsBadConfigAndShapes) {
  const Matrix x = grid(5);
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  EXPECT_THROW(train(init_kaiming({1, 2, 1}, 0), x, x, cfg), std::invalid_argument);
  cfg.learning_rate = 0.1;
  EXPECT_THROW(train(init_kaiming({2, 2, 1}, 0), x, x, cfg), DimensionError);
  cfg.loss = Loss::CrossEntropy;
  Matrix bad = x;
  bad(0, 0) = 7;
  EXPECT_THROW(train(init_kaiming({1, 2, 2}, 0), x, bad, cfg), std::invalid_argument);
}

TEST(Train, Deterministic) {
  const Matrix x = grid(15);
  TrainConfig cfg;
  cfg.epochs = 50;
  const auto a = train(init_kaiming({1, 6, 1}, 9), x, x.array().square().matrix(), cfg);
  const auto b = train(init_kaiming({1, 6, 1}, 9), x, x.array().square().matrix(), cfg);
  EXPECT_EQ(a.network, b.network);
  EXPECT_EQ(a.loss_history, b.loss_history);
}
