#pragma once
// Independent reference implementations used to check the library.

#include "ovh/ovh.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <bitset>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <vector>

namespace oracle {

using ovh::Matrix;
using ovh::Vector;

/// Rank by Gaussian elimination with partial pivoting.
inline std::size_t row_reduction_rank(Matrix m, double rel_tol = 1e-9) {
  const double scale = m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
  if (scale == 0.0) return 0;
  std::size_t rank = 0;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < m.cols() && row < m.rows(); ++col) {
    Eigen::Index best = row;
    for (Eigen::Index r = row + 1; r < m.rows(); ++r)
      if (std::abs(m(r, col)) > std::abs(m(best, col))) best = r;
    if (std::abs(m(best, col)) <= rel_tol * scale) continue;
    m.row(row).swap(m.row(best));
    for (Eigen::Index r = row + 1; r < m.rows(); ++r) m.row(r) -= (m(r, col) / m(row, col)) * m.row(row);
    ++row;
    ++rank;
  }
  return rank;
}

inline Matrix naive_distances(const Matrix& pts) {
  Matrix d(pts.rows(), pts.rows());
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (Eigen::Index j = 0; j < pts.rows(); ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < pts.cols(); ++k) s += (pts(i, k) - pts(j, k)) * (pts(i, k) - pts(j, k));
      d(i, j) = std::sqrt(s);
    }
  return d;
}

enum class Grid { Feasible, Infeasible, Ambiguous };

/// Lattice search over [-box, box]^2 with the given step for
/// { A x <= b, (optional) e.x = f }. Feasible when a lattice point satisfies
/// every inequality exactly; Infeasible when none comes within the lattice
/// slack; Ambiguous otherwise. With an equality, the coordinate it fixes is
/// solved exactly and the other one runs over the lattice.
inline Grid grid_feasibility(const Matrix& A, const Vector& b, const std::optional<Vector>& e, double f,
                             double step = 1e-3, double box = 100.0) {
  const auto steps = static_cast<long>(std::llround(2.0 * box / step));
  bool near = false;
  auto check = [&](double x, double y, double slack_x, double slack_y) {
    bool exact = true, close = true;
    for (Eigen::Index r = 0; r < A.rows(); ++r) {
      const double v = A(r, 0) * x + A(r, 1) * y - b(r);
      const double slack = std::abs(A(r, 0)) * slack_x + std::abs(A(r, 1)) * slack_y;
      if (v > 0.0) exact = false;
      if (v > slack) close = false;
    }
    if (close) near = true;
    return exact;
  };
  if (!e) {
    // For each lattice x the feasible y form an interval: exact, and relaxed by
    // one lattice step in each coordinate.
    auto has_lattice_point = [&](double lo, double hi) {
      lo = std::max(lo, -box);
      hi = std::min(hi, box);
      if (lo > hi) return false;
      const double y = std::ceil((lo + box) / step - 1e-12) * step - box;
      return y <= hi + 1e-12;
    };
    for (long i = 0; i <= steps; ++i) {
      const double x = -box + static_cast<double>(i) * step;
      double lo = -box, hi = box, rlo = -box, rhi = box;
      bool empty = false, rempty = false;
      for (Eigen::Index r = 0; r < A.rows(); ++r) {
        const double rest = b(r) - A(r, 0) * x;
        const double relaxed = rest + (std::abs(A(r, 0)) + std::abs(A(r, 1))) * step;
        if (A(r, 1) > 0) {
          hi = std::min(hi, rest / A(r, 1));
          rhi = std::min(rhi, relaxed / A(r, 1));
        } else if (A(r, 1) < 0) {
          lo = std::max(lo, rest / A(r, 1));
          rlo = std::max(rlo, relaxed / A(r, 1));
        } else {
          empty = empty || rest < 0;
          rempty = rempty || relaxed < 0;
        }
      }
      if (!empty && has_lattice_point(lo, hi)) {
        // confirm on the lattice point itself
        const double y = std::ceil((std::max(lo, -box) + box) / step - 1e-12) * step - box;
        if (check(x, y, 0.0, 0.0)) return Grid::Feasible;
        near = true;
      }
      if (!rempty && has_lattice_point(rlo, rhi)) near = true;
    }
  } else {
    const Vector& ev = *e;
    const int fixed = std::abs(ev(1)) >= std::abs(ev(0)) ? 1 : 0;
    const int free = 1 - fixed;
    if (ev(fixed) == 0.0) return f == 0.0 ? Grid::Ambiguous : Grid::Infeasible;
    for (long i = 0; i <= steps; ++i) {
      const double t = -box + static_cast<double>(i) * step;
      const double s = (f - ev(free) * t) / ev(fixed);
      double xy[2];
      xy[free] = t;
      xy[fixed] = s;
      const double slack_fixed = std::abs(ev(free) / ev(fixed)) * step;
      if (check(xy[0], xy[1], free == 0 ? step : slack_fixed, free == 1 ? step : slack_fixed)) {
        return Grid::Feasible;
      }
    }
  }
  return near ? Grid::Ambiguous : Grid::Infeasible;
}

/// Z/2 rank of a list of columns given as sorted row-index sets.
inline std::size_t z2_rank(std::vector<std::vector<std::size_t>> cols, std::size_t rows) {
  std::vector<std::vector<bool>> m;
  for (const auto& c : cols) {
    std::vector<bool> v(rows, false);
    for (auto r : c) v[r] = !v[r];
    m.push_back(std::move(v));
  }
  std::size_t rank = 0;
  for (std::size_t r = 0; r < rows && rank < m.size(); ++r) {
    std::size_t pivot = rank;
    while (pivot < m.size() && !m[pivot][r]) ++pivot;
    if (pivot == m.size()) continue;
    std::swap(m[rank], m[pivot]);
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (k != rank && m[k][r]) {
        for (std::size_t q = 0; q < rows; ++q) m[k][q] = m[k][q] != m[rank][q];
      }
    }
    ++rank;
  }
  return rank;
}

/// Betti numbers 0..max_dim of the Rips complex at scale eps (diameter <= eps),
/// from ranks of the Z/2 boundary matrices. Small point counts only.
inline std::vector<std::size_t> brute_force_betti(const Matrix& d, double eps, std::size_t max_dim) {
  const auto n = static_cast<std::size_t>(d.rows());
  std::vector<std::vector<std::vector<std::size_t>>> simplices(max_dim + 2);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t v = 0; v < n; ++v)
      if (mask & (1u << v)) s.push_back(v);
    if (s.size() > max_dim + 2) continue;
    bool ok = true;
    for (std::size_t a = 0; a < s.size() && ok; ++a)
      for (std::size_t c = a + 1; c < s.size() && ok; ++c)
        ok = d(static_cast<Eigen::Index>(s[a]), static_cast<Eigen::Index>(s[c])) <= eps;
    if (ok) simplices[s.size() - 1].push_back(s);
  }
  std::vector<std::size_t> boundary_rank(max_dim + 3, 0);  // rank of d_k : C_k -> C_{k-1}
  for (std::size_t k = 1; k <= max_dim + 1; ++k) {
    std::map<std::vector<std::size_t>, std::size_t> index;
    for (std::size_t i = 0; i < simplices[k - 1].size(); ++i) index[simplices[k - 1][i]] = i;
    std::vector<std::vector<std::size_t>> cols;
    for (const auto& s : simplices[k]) {
      std::vector<std::size_t> col;
      for (std::size_t drop = 0; drop < s.size(); ++drop) {
        auto face = s;
        face.erase(face.begin() + static_cast<std::ptrdiff_t>(drop));
        col.push_back(index.at(face));
      }
      cols.push_back(col);
    }
    boundary_rank[k] = z2_rank(cols, simplices[k - 1].size());
  }
  std::vector<std::size_t> betti(max_dim + 1);
  for (std::size_t k = 0; k <= max_dim; ++k)
    betti[k] = simplices[k].size() - boundary_rank[k] - boundary_rank[k + 1];
  return betti;
}

/// Connected components of a graph given by edges, as sorted classes of size >= 2.
inline std::vector<std::vector<std::size_t>> components(std::size_t n,
                                                        const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  std::vector<std::vector<std::size_t>> adj(n);
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::vector<char> seen(n, 0);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> comp;
    std::queue<std::size_t> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      const auto u = q.front();
      q.pop();
      comp.push_back(u);
      for (auto v : adj[u])
        if (!seen[v]) {
          seen[v] = 1;
          q.push(v);
        }
    }
    std::sort(comp.begin(), comp.end());
    if (comp.size() > 1) out.push_back(comp);
  }
  return out;
}

/// Whether some x in P has M x + c = t, decided algebraically: particular
/// solution by SVD plus a search along the null space (dimension <= 1, or the
/// zero map). Inputs of dimension <= 2 are fully covered.
inline bool preimage_in_polyhedron(const ovh::AffineMap& map, const ovh::HPolyhedron& P, const Vector& t,
                                   double tol = 1e-6) {
  const Matrix& M = map.linear();
  const Vector rhs = t - map.offset();
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-10 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > cutoff) ++r;
  Vector x0 = Vector::Zero(M.cols());
  for (Eigen::Index k = 0; k < r; ++k) x0 += (svd.matrixU().col(k).dot(rhs) / sv(k)) * svd.matrixV().col(k);
  if ((M * x0 - rhs).norm() > tol * (1.0 + rhs.norm())) return false;
  const Eigen::Index nullity = M.cols() - r;
  if (nullity == 0) return ((P.A * x0 - P.b).array() <= tol).all();
  if (nullity == 1) {
    const Vector v = svd.matrixV().col(M.cols() - 1);
    double lo = -1e300, hi = 1e300;
    for (Eigen::Index i = 0; i < P.A.rows(); ++i) {
      const double a = P.A.row(i).dot(v);
      const double rest = P.b(i) + tol - P.A.row(i).dot(x0);
      if (std::abs(a) < 1e-14) {
        if (rest < 0) return false;
      } else if (a > 0) {
        hi = std::min(hi, rest / a);
      } else {
        lo = std::max(lo, rest / a);
      }
    }
    return lo <= hi;
  }
  if (r == 0) return true;  // zero map with matching constant: any point of a populated region
  throw std::invalid_argument("preimage_in_polyhedron: null space of dimension > 1 unsupported");
}

/// Overlap pairs by the output-collision route: the same region-pair sweep and
/// delta prefilter, with feasibility decided by preimage_in_polyhedron.
inline std::vector<ovh::PointPair> collision_pairs(const ovh::MLPNetwork& net, std::size_t layer,
                                                   const ovh::PopulatedDecomposition& decomp, const Matrix& data,
                                                   double delta, double tol = 1e-6) {
  const Matrix out = ovh::layer_outputs(net, data, layer);
  std::vector<ovh::AffineMap> maps;
  for (const auto& reg : decomp.regions) maps.push_back(ovh::region_affine_map(net, reg.codeword, layer));
  auto hits = [&](std::size_t from, std::size_t to) {
    std::vector<std::size_t> h;
    for (auto y : decomp.regions[from].points) {
      bool near = false;
      for (auto z : decomp.regions[to].points)
        near = near || (out.row(static_cast<Eigen::Index>(y)) - out.row(static_cast<Eigen::Index>(z))).norm() <= delta;
      if (near && preimage_in_polyhedron(maps[to], decomp.regions[to].polyhedron,
                                         out.row(static_cast<Eigen::Index>(y)).transpose(), tol)) {
        h.push_back(y);
      }
    }
    return h;
  };
  std::vector<ovh::PointPair> pairs;
  for (std::size_t i = 0; i < decomp.size(); ++i)
    for (std::size_t j = i + 1; j < decomp.size(); ++j) {
      const auto a = hits(i, j), b = hits(j, i);
      for (auto y : a)
        for (auto z : b) pairs.emplace_back(std::min(y, z), std::max(y, z));
    }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

/// Classes from the collision pairs via graph components.
inline std::vector<std::vector<std::size_t>> collision_classes(std::size_t n, const std::vector<ovh::PointPair>& pairs) {
  return components(n, pairs);
}

/// The |x| network: W1 = [1; -1], W2 = [1 1].
inline ovh::MLPNetwork abs_net() {
  Matrix w1(2, 1);
  w1 << 1, -1;
  Matrix w2(1, 2);
  w2 << 1, 1;
  return ovh::MLPNetwork({ovh::AffineMap(w1, Vector::Zero(2)), ovh::AffineMap(w2, Vector::Zero(1))});
}

inline Matrix grid_1d(double lo, double hi, std::size_t n) {
  Matrix x(static_cast<Eigen::Index>(n), 1);
  for (std::size_t i = 0; i < n; ++i) x(static_cast<Eigen::Index>(i), 0) = lo + (hi - lo) * double(i) / double(n - 1);
  return x;
}

struct PlanarProblem {
  Matrix A;
  Vector b;
  std::optional<Vector> e;
  double f = 0.0;

  ovh::FeasibilityProblem problem() const {
    ovh::FeasibilityProblem p{A, b, Matrix(0, 2), Vector(0)};
    if (e) {
      p.A_eq = e->transpose();
      p.b_eq = Vector::Constant(1, f);
    }
    return p;
  }
};

/// 2-4 random half-planes inside the box |x_i| <= 5, plus an equality half the time.
inline PlanarProblem random_planar_problem(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  const int m = 2 + static_cast<int>(rng() % 3);
  PlanarProblem p;
  p.A.resize(m + 4, 2);
  p.b.resize(m + 4);
  for (int i = 0; i < m; ++i) {
    p.A(i, 0) = n(rng);
    p.A(i, 1) = n(rng);
    p.b(i) = n(rng);
  }
  p.A.bottomRows(4) << 1, 0, -1, 0, 0, 1, 0, -1;
  p.b.tail(4).setConstant(5.0);
  if (rng() % 2) {
    p.e = Vector(2);
    (*p.e) << n(rng), n(rng);
    p.f = n(rng);
  }
  return p;
}

}  // namespace oracle
