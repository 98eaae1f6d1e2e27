#pragma once

#include "ovh/network.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ovh {

enum class Loss { MeanSquaredError, CrossEntropy };
enum class Optimizer { GradientDescent, Adam };

struct StopCriterion {
  enum class Kind { LossBelow, AccuracyAbove };
  Kind kind = Kind::LossBelow;
  double threshold = 0.0;
};

struct TrainConfig {
  Loss loss = Loss::MeanSquaredError;
  double learning_rate = 1e-3;
  std::size_t epochs = 100;
  std::optional<StopCriterion> stop;
  std::uint64_t seed = 0;
  Optimizer optimizer = Optimizer::Adam;

  void validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("TrainConfig: learning_rate must be > 0");
    if (epochs == 0) throw std::invalid_argument("TrainConfig: epochs must be > 0");
  }
};

struct TrainResult {
  MLPNetwork network;
  std::vector<double> loss_history;  // loss before each update
  double final_loss = 0.0;           // loss of the returned network
  double final_accuracy = 0.0;       // cross-entropy only
  bool stopped_early = false;
};

namespace detail {

/// Class index per row: argmax of one-hot rows or the single label column.
inline std::vector<Eigen::Index> class_indices(const Matrix& targets, Eigen::Index classes) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(targets.rows()));
  for (Eigen::Index i = 0; i < targets.rows(); ++i) {
    Eigen::Index c = 0;
    if (targets.cols() == 1 && classes > 1) {
      const double v = targets(i, 0);
      c = static_cast<Eigen::Index>(std::llround(v));
      if (c < 0 || c >= classes || std::abs(v - static_cast<double>(c)) > 1e-9) {
        throw std::invalid_argument("train: class label out of range at row " + std::to_string(i));
      }
    } else {
      targets.row(i).maxCoeff(&c);
    }
    idx[static_cast<std::size_t>(i)] = c;
  }
  return idx;
}

struct ForwardCache {
  std::vector<Matrix> pre;   // preactivations per layer
  std::vector<Matrix> post;  // post[0] = inputs, post[k] = representation of layer k
};

inline ForwardCache batch_forward(const MLPNetwork& net, const Matrix& inputs) {
  ForwardCache c;
  c.post.push_back(inputs);
  for (std::size_t k = 1; k <= net.depth(); ++k) {
    const auto& l = net.at(k);
    Matrix z = (c.post.back() * l.linear().transpose()).rowwise() + l.offset().transpose();
    Matrix h = (k == net.depth()) ? z : Matrix(z.cwiseMax(0.0));
    c.pre.push_back(std::move(z));
    c.post.push_back(std::move(h));
  }
  return c;
}

/// Loss and gradient w.r.t. the final (unactivated) layer.
inline double loss_and_grad(Loss loss, const Matrix& out, const Matrix& targets,
                            const std::vector<Eigen::Index>& labels, Matrix& grad) {
  const double n = static_cast<double>(out.rows());
  if (loss == Loss::MeanSquaredError) {
    const Matrix diff = out - targets;
    grad = diff * (2.0 / (n * static_cast<double>(out.cols())));
    return diff.squaredNorm() / (n * static_cast<double>(out.cols()));
  }
  grad.resize(out.rows(), out.cols());
  double total = 0.0;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double m = out.row(i).maxCoeff();
    const Eigen::RowVectorXd e = (out.row(i).array() - m).exp().matrix();
    const double s = e.sum();
    const auto y = labels[static_cast<std::size_t>(i)];
    total += -(out(i, y) - m - std::log(s));
    grad.row(i) = e / s;
    grad(i, y) -= 1.0;
  }
  grad /= n;
  return total / n;
}

inline double accuracy(const Matrix& out, const std::vector<Eigen::Index>& labels) {
  std::size_t hits = 0;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    Eigen::Index c = 0;
    out.row(i).maxCoeff(&c);
    hits += (c == labels[static_cast<std::size_t>(i)]);
  }
  return static_cast<double>(hits) / static_cast<double>(out.rows());
}

}  // namespace detail

/// Predicted class per row (argmax of the network output).
inline std::vector<Eigen::Index> predict_classes(const MLPNetwork& net, const Matrix& inputs) {
  const Matrix out = layer_outputs(net, inputs, net.depth());
  std::vector<Eigen::Index> pred(static_cast<std::size_t>(out.rows()));
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i).maxCoeff(&pred[static_cast<std::size_t>(i)]);
  return pred;
}

/// Full-batch training by backpropagation. Cross-entropy targets are one-hot rows
/// or a single column of class indices.
inline TrainResult train(MLPNetwork net, const Matrix& inputs, const Matrix& targets,
                         const TrainConfig& cfg) {
  cfg.validate();
  if (inputs.rows() == 0) throw std::invalid_argument("train: empty dataset");
  if (inputs.cols() != net.input_dim() || targets.rows() != inputs.rows()) {
    throw DimensionError("train: data shape does not match network");
  }
  const bool ce = cfg.loss == Loss::CrossEntropy;
  std::vector<Eigen::Index> labels;
  if (ce) {
    if (targets.cols() != 1 && targets.cols() != net.output_dim()) {
      throw DimensionError("train: cross-entropy targets need one column or one-hot rows");
    }
    labels = detail::class_indices(targets, net.output_dim());
  } else if (targets.cols() != net.output_dim()) {
    throw DimensionError("train: target width does not match network output");
  }

  const std::size_t L = net.depth();
  std::vector<Matrix> W(L);
  std::vector<Vector> b(L);
  for (std::size_t k = 0; k < L; ++k) {
    W[k] = net.layers()[k].linear();
    b[k] = net.layers()[k].offset();
  }
  std::vector<Matrix> mW(L), vW(L);
  std::vector<Vector> mb(L), vb(L);
  for (std::size_t k = 0; k < L; ++k) {
    mW[k] = Matrix::Zero(W[k].rows(), W[k].cols());
    vW[k] = mW[k];
    mb[k] = Vector::Zero(b[k].size());
    vb[k] = mb[k];
  }
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

  auto rebuild = [&] {
    std::vector<AffineMap> layers;
    for (std::size_t k = 0; k < L; ++k) layers.emplace_back(W[k], b[k]);
    return MLPNetwork(std::move(layers));
  };

  TrainResult result;
  Matrix grad;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto cache = detail::batch_forward(rebuild(), inputs);
    const double loss = detail::loss_and_grad(cfg.loss, cache.post.back(), targets, labels, grad);
    if (!std::isfinite(loss)) {
      throw NumericError("train: loss became " + std::to_string(loss) + " at epoch " +
                         std::to_string(epoch) + " (learning rate " +
                         std::to_string(cfg.learning_rate) + ")");
    }
    result.loss_history.push_back(loss);
    if (cfg.stop) {
      const bool hit = cfg.stop->kind == StopCriterion::Kind::LossBelow
                           ? loss < cfg.stop->threshold
                           : ce && detail::accuracy(cache.post.back(), labels) > cfg.stop->threshold;
      if (hit) {
        result.stopped_early = true;
        break;
      }
    }

    Matrix delta = grad;
    const double t = static_cast<double>(epoch + 1);
    for (std::size_t k = L; k-- > 0;) {
      Matrix gW = delta.transpose() * cache.post[k];
      Vector gb = delta.colwise().sum().transpose();
      if (k > 0) {
        delta = (delta * W[k]).cwiseProduct((cache.pre[k - 1].array() > 0.0).cast<double>().matrix());
      }
      if (cfg.optimizer == Optimizer::GradientDescent) {
        W[k] -= cfg.learning_rate * gW;
        b[k] -= cfg.learning_rate * gb;
        continue;
      }
      mW[k] = beta1 * mW[k] + (1 - beta1) * gW;
      vW[k] = beta2 * vW[k] + (1 - beta2) * gW.cwiseAbs2();
      mb[k] = beta1 * mb[k] + (1 - beta1) * gb;
      vb[k] = beta2 * vb[k] + (1 - beta2) * gb.cwiseAbs2();
      const double c1 = 1.0 - std::pow(beta1, t), c2 = 1.0 - std::pow(beta2, t);
      W[k].array() -= cfg.learning_rate * (mW[k].array() / c1) / ((vW[k].array() / c2).sqrt() + eps);
      b[k].array() -= cfg.learning_rate * (mb[k].array() / c1) / ((vb[k].array() / c2).sqrt() + eps);
    }
  }

  result.network = rebuild();
  const Matrix out = layer_outputs(result.network, inputs, L);
  result.final_loss = detail::loss_and_grad(cfg.loss, out, targets, labels, grad);
  if (!std::isfinite(result.final_loss)) throw NumericError("train: final loss is not finite");
  if (ce) result.final_accuracy = detail::accuracy(out, labels);
  return result;
}

}  // namespace ovh
