#pragma once

#include "ovh/linalg.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace ovh {

struct DatasetMetadata {
  std::string generator;
  std::map<std::string, double> parameters;
  std::uint64_t seed = 0;
  std::vector<std::size_t> betti;  // ground truth, when known
};

/// Inputs are rows. Classification targets are a single column of class indices.
struct LabeledDataset {
  Matrix inputs;
  Matrix targets;
  bool classification = false;
  DatasetMetadata metadata;

  std::size_t size() const noexcept { return static_cast<std::size_t>(inputs.rows()); }

  /// Rows whose class label equals `label`.
  std::vector<std::size_t> rows_with_label(int label) const {
    std::vector<std::size_t> out;
    for (Eigen::Index i = 0; i < targets.rows(); ++i)
      if (static_cast<int>(std::lround(targets(i, 0))) == label) out.push_back(static_cast<std::size_t>(i));
    return out;
  }
};

inline Matrix select_rows(const Matrix& m, const std::vector<std::size_t>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = m.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

/// Curve t -> cos(a t) (cos(b t), sin(b t)) sampled at n equally spaced t in
/// [-pi, pi]; inputs are (t, 0).
inline LabeledDataset gen_curve(double a, double b, std::size_t n) {
  if (n < 2) throw std::invalid_argument("gen_curve: need n >= 2");
  LabeledDataset ds;
  const auto rows = static_cast<Eigen::Index>(n);
  ds.inputs = Matrix::Zero(rows, 2);
  ds.targets.resize(rows, 2);
  constexpr double pi = std::numbers::pi;
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double t = -pi + 2.0 * pi * static_cast<double>(i) / static_cast<double>(n - 1);
    ds.inputs(i, 0) = t;
    ds.targets(i, 0) = std::cos(a * t) * std::cos(b * t);
    ds.targets(i, 1) = std::cos(a * t) * std::sin(b * t);
  }
  ds.metadata.generator = "curve";
  ds.metadata.parameters = {{"a", a}, {"b", b}, {"n", static_cast<double>(n)}};
  return ds;
}

/// Curve with a, b drawn from U[-1, 1].
inline LabeledDataset gen_random_curve(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a = u(rng);
  const double b = u(rng);
  auto ds = gen_curve(a, b, n);
  ds.metadata.seed = seed;
  return ds;
}

/// Four d-spheres in R^{d+1} with radii 1, 1.5, 2, 2.5 labelled 0, 1, 0, 1.
inline LabeledDataset gen_concentric_spheres(std::size_t d, std::size_t n_per_sphere,
                                             std::uint64_t seed) {
  if (d == 0 || n_per_sphere == 0) throw std::invalid_argument("gen_concentric_spheres: d and n must be > 0");
  constexpr double radii[] = {1.0, 1.5, 2.0, 2.5};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  LabeledDataset ds;
  const auto rows = static_cast<Eigen::Index>(4 * n_per_sphere);
  const auto dim = static_cast<Eigen::Index>(d + 1);
  ds.inputs.resize(rows, dim);
  ds.targets.resize(rows, 1);
  ds.classification = true;
  Eigen::Index r = 0;
  for (int s = 0; s < 4; ++s) {
    for (std::size_t k = 0; k < n_per_sphere; ++k, ++r) {
      Vector v(dim);
      do {
        for (Eigen::Index c = 0; c < dim; ++c) v(c) = normal(rng);
      } while (v.norm() == 0.0);
      ds.inputs.row(r) = (radii[s] / v.norm()) * v.transpose();
      ds.targets(r, 0) = s % 2;
    }
  }
  ds.metadata.generator = "spheres";
  ds.metadata.parameters = {{"d", static_cast<double>(d)}, {"n_per_sphere", static_cast<double>(n_per_sphere)}};
  ds.metadata.seed = seed;
  return ds;
}

enum class TopologyKind { Circle, AnnulusCloud, WedgeOfCircles, Interval };

inline std::string to_string(TopologyKind k) {
  switch (k) {
    case TopologyKind::Circle: return "circle";
    case TopologyKind::AnnulusCloud: return "annulus-cloud";
    case TopologyKind::WedgeOfCircles: return "wedge-of-circles";
    case TopologyKind::Interval: return "interval";
  }
  return "?";
}

inline TopologyKind topology_kind_from_string(const std::string& s) {
  for (auto k : {TopologyKind::Circle, TopologyKind::AnnulusCloud, TopologyKind::WedgeOfCircles,
                 TopologyKind::Interval}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown topology kind '" + s + "'");
}

/// Point cloud with known Betti numbers (class 0, n points). With
/// `with_complement`, a contractible blob it encloses or runs alongside is
/// appended as class 1 (n/2 points) so the cloud can be fed to a classifier.
/// Ground-truth Betti numbers of class 0 go into metadata.
///   circle: unit circle, (1, 1)          annulus-cloud: radii in [0.8, 1.2], (1, 1)
///   wedge-of-circles: circles of radius 1 centred at (+-1, 0), sharing (0, 0), (1, 2)
///   interval: segment [-1, 1] x {0}, (1, 0)
inline LabeledDataset gen_known_topology(TopologyKind kind, std::size_t n, double noise,
                                         std::uint64_t seed, bool with_complement = false) {
  if (n < 10) throw std::invalid_argument("gen_known_topology: need n >= 10");
  if (noise < 0.0) throw std::invalid_argument("gen_known_topology: noise must be >= 0");
  constexpr double pi = std::numbers::pi;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n_blob = with_complement ? n / 2 : 0;
  LabeledDataset ds;
  ds.inputs.resize(static_cast<Eigen::Index>(n + n_blob), 2);
  ds.targets.resize(static_cast<Eigen::Index>(n + n_blob), 1);
  ds.classification = true;

  auto blob = [&](double cx, double cy, double radius) {
    const double r = radius * std::sqrt(unit(rng));
    const double t = 2.0 * pi * unit(rng);
    return std::pair{cx + r * std::cos(t), cy + r * std::sin(t)};
  };

  for (std::size_t i = 0; i < n; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(n);
    double x = 0.0, y = 0.0;
    switch (kind) {
      case TopologyKind::Circle:
        x = std::cos(2.0 * pi * frac);
        y = std::sin(2.0 * pi * frac);
        break;
      case TopologyKind::AnnulusCloud: {
        const double r = 0.8 + 0.4 * unit(rng);
        const double t = 2.0 * pi * unit(rng);
        x = r * std::cos(t);
        y = r * std::sin(t);
        break;
      }
      case TopologyKind::WedgeOfCircles: {
        // The left lobe starts at the tangent point; the right lobe skips it, so
        // the origin is sampled exactly once.
        const std::size_t half = n / 2;
        const bool left = i < half;
        const std::size_t j = left ? i : i - half + 1;
        const std::size_t count = left ? half : n - half + 1;
        const double t = 2.0 * pi * static_cast<double>(j) / static_cast<double>(count);
        const double cx = left ? -1.0 : 1.0;
        x = cx - cx * std::cos(t);
        y = std::sin(t);
        break;
      }
      case TopologyKind::Interval:
        x = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(n - 1);
        y = 0.0;
        break;
    }
    if (noise > 0.0) {
      x += noise * jitter(rng);
      y += noise * jitter(rng);
    }
    ds.inputs(static_cast<Eigen::Index>(i), 0) = x;
    ds.inputs(static_cast<Eigen::Index>(i), 1) = y;
    ds.targets(static_cast<Eigen::Index>(i), 0) = 0;
  }
  for (std::size_t k = 0; k < n_blob; ++k) {
    std::pair<double, double> p;
    switch (kind) {
      case TopologyKind::Circle:
      case TopologyKind::AnnulusCloud: p = blob(0.0, 0.0, 0.4); break;
      case TopologyKind::WedgeOfCircles: p = blob(k % 2 ? 1.0 : -1.0, 0.0, 0.4); break;
      case TopologyKind::Interval: p = {-1.0 + 2.0 * unit(rng), 0.5 + 0.1 * (unit(rng) - 0.5)}; break;
    }
    const auto row = static_cast<Eigen::Index>(n + k);
    ds.inputs(row, 0) = p.first;
    ds.inputs(row, 1) = p.second;
    ds.targets(row, 0) = 1;
  }
  ds.metadata.generator = to_string(kind);
  ds.metadata.parameters = {{"n", static_cast<double>(n)},
                            {"noise", noise},
                            {"complement", with_complement ? 1.0 : 0.0}};
  ds.metadata.seed = seed;
  switch (kind) {
    case TopologyKind::Circle:
    case TopologyKind::AnnulusCloud: ds.metadata.betti = {1, 1}; break;
    case TopologyKind::WedgeOfCircles: ds.metadata.betti = {1, 2}; break;
    case TopologyKind::Interval: ds.metadata.betti = {1, 0}; break;
  }
  return ds;
}

}  // namespace ovh
