#pragma once

#include "ovh/linalg.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace ovh {

/// Fully connected ReLU network. ReLU follows every layer except the last.
/// Layers are addressed 1-based throughout: layer 1 is the first affine map.
class MLPNetwork {
 public:
  MLPNetwork() = default;

  explicit MLPNetwork(std::vector<AffineMap> layers) : layers_(std::move(layers)) {
    if (layers_.empty()) throw DimensionError("MLPNetwork: no layers");
    for (std::size_t k = 1; k < layers_.size(); ++k) {
      if (layers_[k].in_dim() != layers_[k - 1].out_dim()) {
        throw DimensionError("MLPNetwork: layer " + std::to_string(k + 1) + " expects " +
                             std::to_string(layers_[k].in_dim()) + " inputs but layer " +
                             std::to_string(k) + " has " + std::to_string(layers_[k - 1].out_dim()) +
                             " outputs");
      }
    }
  }

  std::size_t depth() const noexcept { return layers_.size(); }
  Eigen::Index input_dim() const { return layers_.front().in_dim(); }
  Eigen::Index output_dim() const { return layers_.back().out_dim(); }
  Eigen::Index width(std::size_t layer) const { return at(layer).out_dim(); }

  const AffineMap& at(std::size_t layer) const {
    check_layer(layer);
    return layers_[layer - 1];
  }
  const std::vector<AffineMap>& layers() const noexcept { return layers_; }

  /// Layer dimensions {n_0, n_1, ..., n_L}.
  std::vector<std::size_t> shape() const {
    std::vector<std::size_t> s{static_cast<std::size_t>(input_dim())};
    for (const auto& l : layers_) s.push_back(static_cast<std::size_t>(l.out_dim()));
    return s;
  }

  void check_layer(std::size_t layer) const {
    if (layer < 1 || layer > layers_.size()) {
      throw std::out_of_range("layer " + std::to_string(layer) + " outside 1.." +
                              std::to_string(layers_.size()));
    }
  }

  bool operator==(const MLPNetwork& other) const {
    if (layers_.size() != other.layers_.size()) return false;
    for (std::size_t k = 0; k < layers_.size(); ++k) {
      if (layers_[k].linear() != other.layers_[k].linear() ||
          layers_[k].offset() != other.layers_[k].offset()) {
        return false;
      }
    }
    return true;
  }

 private:
  std::vector<AffineMap> layers_;
};

struct LayerTrace {
  std::vector<Vector> preactivations;
  std::vector<Vector> representations;

  std::size_t depth() const noexcept { return preactivations.size(); }
  const Vector& output() const { return representations.back(); }
};

inline LayerTrace forward(const MLPNetwork& net, const Vector& x) {
  if (x.size() != net.input_dim()) {
    throw DimensionError("forward: input of length " + std::to_string(x.size()) +
                         " for network with input dimension " + std::to_string(net.input_dim()));
  }
  LayerTrace trace;
  trace.preactivations.reserve(net.depth());
  trace.representations.reserve(net.depth());
  Vector h = x;
  for (std::size_t k = 1; k <= net.depth(); ++k) {
    Vector z = net.at(k)(h);
    h = (k == net.depth()) ? z : Vector(z.cwiseMax(0.0));
    trace.preactivations.push_back(std::move(z));
    trace.representations.push_back(h);
  }
  return trace;
}

/// Representations of all rows of `inputs` at `layer` (rows = points).
inline Matrix layer_outputs(const MLPNetwork& net, const Matrix& inputs, std::size_t layer) {
  net.check_layer(layer);
  if (inputs.cols() != net.input_dim()) {
    throw DimensionError("layer_outputs: inputs have " + std::to_string(inputs.cols()) +
                         " columns, network expects " + std::to_string(net.input_dim()));
  }
  Matrix h = inputs;
  for (std::size_t k = 1; k <= layer; ++k) {
    const auto& l = net.at(k);
    Matrix z = (h * l.linear().transpose()).rowwise() + l.offset().transpose();
    h = (k == net.depth()) ? z : Matrix(z.cwiseMax(0.0));
  }
  return h;
}

using Bits = std::vector<std::uint8_t>;

/// Sign pattern of the layer's preactivation; zero counts as active.
inline Bits precodeword(const LayerTrace& trace, std::size_t layer) {
  if (layer < 1 || layer > trace.depth()) {
    throw std::out_of_range("precodeword: layer " + std::to_string(layer) + " not in trace");
  }
  const Vector& z = trace.preactivations[layer - 1];
  Bits bits(static_cast<std::size_t>(z.size()));
  for (Eigen::Index i = 0; i < z.size(); ++i) bits[static_cast<std::size_t>(i)] = z(i) >= 0.0;
  return bits;
}

/// Stacked per-layer activation patterns for layers 1..layer_count().
class GlobalCodeword {
 public:
  GlobalCodeword() = default;

  GlobalCodeword(Bits bits, std::vector<std::size_t> layer_sizes)
      : bits_(std::move(bits)), layer_sizes_(std::move(layer_sizes)) {
    std::size_t total = 0;
    for (auto s : layer_sizes_) total += s;
    if (total != bits_.size()) {
      throw DimensionError("GlobalCodeword: " + std::to_string(bits_.size()) +
                           " bits for layers totalling " + std::to_string(total));
    }
    for (auto b : bits_) {
      if (b > 1) throw std::invalid_argument("GlobalCodeword: bits must be 0 or 1");
    }
  }

  const Bits& bits() const noexcept { return bits_; }
  const std::vector<std::size_t>& layer_sizes() const noexcept { return layer_sizes_; }
  std::size_t layer_count() const noexcept { return layer_sizes_.size(); }

  /// Bits of layer k (1-based).
  std::span<const std::uint8_t> layer(std::size_t k) const {
    if (k < 1 || k > layer_sizes_.size()) {
      throw std::out_of_range("GlobalCodeword: layer " + std::to_string(k));
    }
    std::size_t start = 0;
    for (std::size_t i = 0; i + 1 < k; ++i) start += layer_sizes_[i];
    return {bits_.data() + start, layer_sizes_[k - 1]};
  }

  std::string to_string() const {
    std::string s;
    for (std::size_t k = 1; k <= layer_count(); ++k) {
      if (k > 1) s.push_back('|');
      for (auto b : layer(k)) s.push_back(b ? '1' : '0');
    }
    return s;
  }

  auto operator<=>(const GlobalCodeword&) const = default;

 private:
  Bits bits_;
  std::vector<std::size_t> layer_sizes_;
};

struct GlobalCodewordHash {
  std::size_t operator()(const GlobalCodeword& c) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (auto b : c.bits()) h = (h ^ b) * 1099511628211ULL;
    return h ^ c.layer_count();
  }
};

inline GlobalCodeword codeword_from_trace(const LayerTrace& trace, std::size_t upto_layer) {
  if (upto_layer < 1 || upto_layer > trace.depth()) {
    throw std::out_of_range("global_codeword: layer " + std::to_string(upto_layer));
  }
  Bits bits;
  std::vector<std::size_t> sizes;
  for (std::size_t k = 1; k <= upto_layer; ++k) {
    auto p = precodeword(trace, k);
    sizes.push_back(p.size());
    bits.insert(bits.end(), p.begin(), p.end());
  }
  return {std::move(bits), std::move(sizes)};
}

inline GlobalCodeword global_codeword(const MLPNetwork& net, const Vector& x,
                                      std::size_t upto_layer) {
  net.check_layer(upto_layer);
  return codeword_from_trace(forward(net, x), upto_layer);
}

namespace detail {

inline void check_codeword(const MLPNetwork& net, const GlobalCodeword& J, std::size_t upto_layer) {
  net.check_layer(upto_layer);
  if (J.layer_count() < upto_layer) {
    throw DimensionError("codeword covers " + std::to_string(J.layer_count()) +
                         " layers, need " + std::to_string(upto_layer));
  }
  for (std::size_t k = 1; k <= upto_layer; ++k) {
    if (J.layer_sizes()[k - 1] != static_cast<std::size_t>(net.width(k))) {
      throw DimensionError("codeword layer " + std::to_string(k) + " has " +
                           std::to_string(J.layer_sizes()[k - 1]) + " bits, network width is " +
                           std::to_string(net.width(k)));
    }
  }
}

/// Q_J * map: zero the rows of inactive neurons.
inline AffineMap mask_rows(const AffineMap& map, std::span<const std::uint8_t> bits) {
  Matrix lin = map.linear();
  Vector off = map.offset();
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (!bits[i]) {
      lin.row(static_cast<Eigen::Index>(i)).setZero();
      off(static_cast<Eigen::Index>(i)) = 0.0;
    }
  }
  return {std::move(lin), std::move(off)};
}

}  // namespace detail

/// Preactivation map x -> T_k(Phi^{k-1}(x)) valid on the region of J, using the
/// masks of layers 1..k-1.
inline AffineMap region_preactivation_map(const MLPNetwork& net, const GlobalCodeword& J,
                                          std::size_t k) {
  detail::check_codeword(net, J, k == 1 ? 1 : k - 1);
  net.check_layer(k);
  AffineMap acc = AffineMap::identity(net.input_dim());
  for (std::size_t i = 1; i < k; ++i) {
    acc = detail::mask_rows(compose_affine(net.at(i), acc), J.layer(i));
  }
  return compose_affine(net.at(k), acc);
}

/// The affine map the network applies on the polyhedron of J, up to `upto_layer`.
/// The final layer is never masked.
inline AffineMap region_affine_map(const MLPNetwork& net, const GlobalCodeword& J,
                                   std::size_t upto_layer) {
  detail::check_codeword(net, J, upto_layer);
  AffineMap acc = AffineMap::identity(net.input_dim());
  for (std::size_t k = 1; k <= upto_layer; ++k) {
    acc = compose_affine(net.at(k), acc);
    if (k < net.depth()) acc = detail::mask_rows(acc, J.layer(k));
  }
  return acc;
}

/// Kaiming-normal weights, N(0, 2 / fan_in), zero biases. `shape` = {n_0, ..., n_L}.
inline MLPNetwork init_kaiming(const std::vector<std::size_t>& shape, std::uint64_t seed) {
  if (shape.size() < 2) throw DimensionError("init_kaiming: need at least input and output sizes");
  std::mt19937_64 rng(seed);
  std::vector<AffineMap> layers;
  for (std::size_t k = 1; k < shape.size(); ++k) {
    if (shape[k] == 0 || shape[k - 1] == 0) throw DimensionError("init_kaiming: zero width");
    const auto rows = static_cast<Eigen::Index>(shape[k]);
    const auto cols = static_cast<Eigen::Index>(shape[k - 1]);
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(cols)));
    Matrix w(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) w(i, j) = normal(rng);
    layers.emplace_back(std::move(w), Vector::Zero(rows));
  }
  return MLPNetwork(std::move(layers));
}

/// Orthogonal weights from the QR factorization of a Gaussian matrix, zero biases.
/// Rows are orthonormal when a layer narrows, columns when it widens.
inline MLPNetwork init_orthogonal(const std::vector<std::size_t>& shape, std::uint64_t seed) {
  if (shape.size() < 2) throw DimensionError("init_orthogonal: need at least input and output sizes");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<AffineMap> layers;
  for (std::size_t k = 1; k < shape.size(); ++k) {
    if (shape[k] == 0 || shape[k - 1] == 0) throw DimensionError("init_orthogonal: zero width");
    const auto rows = static_cast<Eigen::Index>(shape[k]);
    const auto cols = static_cast<Eigen::Index>(shape[k - 1]);
    const Eigen::Index tall = std::max(rows, cols);
    const Eigen::Index thin = std::min(rows, cols);
    Matrix g(tall, thin);
    for (Eigen::Index i = 0; i < tall; ++i)
      for (Eigen::Index j = 0; j < thin; ++j) g(i, j) = normal(rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(tall, thin);
    // Fix column signs by diag(R) so the result is Haar distributed.
    const Matrix r = qr.matrixQR().topLeftCorner(thin, thin);
    for (Eigen::Index j = 0; j < thin; ++j) {
      if (r(j, j) < 0.0) q.col(j) *= -1.0;
    }
    Matrix w = rows >= cols ? q : Matrix(q.transpose());
    layers.emplace_back(std::move(w), Vector::Zero(rows));
  }
  return MLPNetwork(std::move(layers));
}

}  // namespace ovh
