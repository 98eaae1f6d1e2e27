#pragma once

#include "ovh/lp.hpp"
#include "ovh/network.hpp"

#include <random>
#include <unordered_map>
#include <vector>

namespace ovh {

inline constexpr double kMembershipTolerance = 1e-7;
inline constexpr double kDefaultBoxHalfWidth = 100.0;

/// { x | A x <= b }
struct HPolyhedron {
  Matrix A;
  Vector b;

  Eigen::Index dim() const noexcept { return A.cols(); }
  Eigen::Index constraints() const noexcept { return A.rows(); }

  FeasibilityProblem as_problem() const { return {A, b, Matrix(0, A.cols()), Vector(0)}; }
};

class BoundingBox {
 public:
  BoundingBox(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size()) throw DimensionError("BoundingBox: bound lengths differ");
    for (Eigen::Index i = 0; i < lower_.size(); ++i) {
      if (!(lower_(i) < upper_(i))) {
        throw std::invalid_argument("BoundingBox: lower bound must be below upper bound");
      }
    }
  }

  static BoundingBox symmetric(Eigen::Index dim, double half_width = kDefaultBoxHalfWidth) {
    return {Vector::Constant(dim, -half_width), Vector::Constant(dim, half_width)};
  }

  Eigen::Index dim() const noexcept { return lower_.size(); }
  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }

 private:
  Vector lower_, upper_;
};

inline bool contains(const HPolyhedron& P, const Vector& x, double tol = kMembershipTolerance) {
  if (x.size() != P.dim()) throw DimensionError("contains: point dimension mismatch");
  if (P.constraints() == 0) return true;
  return (P.A * x - P.b).maxCoeff() <= tol;
}

/// H-representation of the polyhedron on which the network has activation pattern J
/// (layers 1..upto_layer), intersected with the bounding box.
inline HPolyhedron build_hrep(const MLPNetwork& net, const GlobalCodeword& J, std::size_t upto_layer,
                              const BoundingBox& box) {
  detail::check_codeword(net, J, upto_layer);
  const Eigen::Index n = net.input_dim();
  if (box.dim() != n) throw DimensionError("build_hrep: bounding box dimension mismatch");
  Eigen::Index rows = 2 * n;
  for (std::size_t k = 1; k <= upto_layer; ++k) rows += net.width(k);

  HPolyhedron P{Matrix(rows, n), Vector(rows)};
  Eigen::Index r = 0;
  AffineMap acc = AffineMap::identity(n);
  for (std::size_t k = 1; k <= upto_layer; ++k) {
    const AffineMap pre = compose_affine(net.at(k), acc);
    const auto bits = J.layer(k);
    for (Eigen::Index i = 0; i < pre.out_dim(); ++i, ++r) {
      const double sign = bits[static_cast<std::size_t>(i)] ? -1.0 : 1.0;
      P.A.row(r) = sign * pre.linear().row(i);
      P.b(r) = -sign * pre.offset()(i);
    }
    acc = detail::mask_rows(pre, bits);
  }
  for (Eigen::Index i = 0; i < n; ++i, r += 2) {
    P.A.row(r).setZero();
    P.A(r, i) = 1.0;
    P.b(r) = box.upper()(i);
    P.A.row(r + 1).setZero();
    P.A(r + 1, i) = -1.0;
    P.b(r + 1) = -box.lower()(i);
  }
  return P;
}

struct Region {
  GlobalCodeword codeword;
  HPolyhedron polyhedron;
  std::vector<std::size_t> points;  // ascending dataset indices
};

/// Populated regions of one layer, ordered by their smallest point index.
struct PopulatedDecomposition {
  std::size_t layer = 0;
  std::vector<Region> regions;
  std::vector<std::size_t> region_of_point;

  std::size_t size() const noexcept { return regions.size(); }

  const Region* find(const GlobalCodeword& c) const {
    for (const auto& r : regions) {
      if (r.codeword == c) return &r;
    }
    return nullptr;
  }
};

inline PopulatedDecomposition populate_decomposition(const MLPNetwork& net, const Matrix& data,
                                                     std::size_t upto_layer,
                                                     const BoundingBox& box) {
  if (data.rows() == 0) throw std::invalid_argument("populate_decomposition: empty dataset");
  net.check_layer(upto_layer);
  PopulatedDecomposition d;
  d.layer = upto_layer;
  d.region_of_point.resize(static_cast<std::size_t>(data.rows()));
  std::unordered_map<GlobalCodeword, std::size_t, GlobalCodewordHash> index;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    auto code = global_codeword(net, data.row(i).transpose(), upto_layer);
    auto [it, inserted] = index.try_emplace(code, d.regions.size());
    if (inserted) d.regions.push_back(Region{std::move(code), {}, {}});
    d.regions[it->second].points.push_back(static_cast<std::size_t>(i));
    d.region_of_point[static_cast<std::size_t>(i)] = it->second;
  }
  for (auto& region : d.regions) {
    region.polyhedron = build_hrep(net, region.codeword, upto_layer, box);
    for (auto p : region.points) {
      if (!contains(region.polyhedron, data.row(static_cast<Eigen::Index>(p)).transpose())) {
        throw NumericError("populate_decomposition: point " + std::to_string(p) +
                           " violates its own region (outside the bounding box?)");
      }
    }
  }
  return d;
}

/// Monte-Carlo volume: uniform samples in the LP-tight axis-aligned enclosing box.
inline double estimate_volume(const HPolyhedron& P, std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw std::invalid_argument("estimate_volume: samples must be > 0");
  const Eigen::Index n = P.dim();
  const auto problem = P.as_problem();
  Vector lo(n), hi(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector c = Vector::Zero(n);
    c(i) = 1.0;
    const auto low = minimize(problem, c);
    if (low.status == LinearProgramSolution::Status::Infeasible) return 0.0;
    const auto high = minimize(problem, -c);
    if (low.status == LinearProgramSolution::Status::Unbounded ||
        high.status != LinearProgramSolution::Status::Optimal) {
      throw NumericError("estimate_volume: polyhedron is unbounded along coordinate " +
                         std::to_string(i));
    }
    lo(i) = low.value;
    hi(i) = -high.value;
    if (!(hi(i) > lo(i))) return 0.0;
  }
  std::mt19937_64 rng(seed);
  std::vector<std::uniform_real_distribution<double>> axes;
  for (Eigen::Index i = 0; i < n; ++i) axes.emplace_back(lo(i), hi(i));
  std::size_t hits = 0;
  Vector x(n);
  for (std::size_t s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < n; ++i) x(i) = axes[static_cast<std::size_t>(i)](rng);
    hits += contains(P, x, 0.0);
  }
  return (hi - lo).prod() * static_cast<double>(hits) / static_cast<double>(samples);
}

/// Occupancy count of each populated region, in region order.
inline std::vector<std::size_t> points_per_region_histogram(const PopulatedDecomposition& d) {
  std::vector<std::size_t> counts;
  counts.reserve(d.regions.size());
  for (const auto& r : d.regions) counts.push_back(r.points.size());
  return counts;
}

}  // namespace ovh
