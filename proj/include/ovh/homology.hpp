#pragma once

#include "ovh/linalg.hpp"
#include "ovh/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <thread>
#include <unordered_map>
#include <vector>

namespace ovh {

inline constexpr std::size_t kDefaultSimplexCap = 5'000'000;

struct Simplex {
  std::vector<std::uint32_t> vertices;  // ascending
  double value = 0.0;                   // diameter

  std::size_t dim() const noexcept { return vertices.size() - 1; }
};

/// Vietoris-Rips simplices sorted by (value, dimension, vertex tuple).
struct Filtration {
  std::vector<Simplex> simplices;
  std::size_t max_dim = 0;
  double max_scale = 0.0;

  std::size_t size() const noexcept { return simplices.size(); }
};

inline Filtration rips_filtration(const DistanceMatrix& d, std::size_t max_dim, double max_scale,
                                  std::size_t simplex_cap = kDefaultSimplexCap) {
  const std::size_t n = d.size();
  Filtration f;
  f.max_dim = max_dim;
  f.max_scale = max_scale;
  std::vector<std::vector<std::uint32_t>> upper(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (d(i, j) <= max_scale) upper[i].push_back(static_cast<std::uint32_t>(j));

  auto push = [&](Simplex s) {
    if (f.simplices.size() >= simplex_cap) {
      throw ResourceCapError("rips_filtration: more than " + std::to_string(simplex_cap) +
                             " simplices; lower the scale or dimension");
    }
    f.simplices.push_back(std::move(s));
  };

  // Depth-first clique expansion; candidates are common higher neighbours.
  std::function<void(const Simplex&, const std::vector<std::uint32_t>&)> expand =
      [&](const Simplex& tau, const std::vector<std::uint32_t>& candidates) {
        if (tau.dim() >= max_dim) return;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
          const std::uint32_t u = candidates[c];
          Simplex sigma = tau;
          for (auto w : tau.vertices) sigma.value = std::max(sigma.value, d(w, u));
          sigma.vertices.push_back(u);
          std::vector<std::uint32_t> next;
          const auto& nu = upper[u];
          std::set_intersection(candidates.begin() + static_cast<std::ptrdiff_t>(c) + 1,
                                candidates.end(), nu.begin(), nu.end(), std::back_inserter(next));
          push(sigma);
          expand(sigma, next);
        }
      };
  for (std::size_t v = 0; v < n; ++v) {
    Simplex s{{static_cast<std::uint32_t>(v)}, 0.0};
    push(s);
    expand(s, upper[v]);
  }
  std::sort(f.simplices.begin(), f.simplices.end(), [](const Simplex& a, const Simplex& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.vertices.size() != b.vertices.size()) return a.vertices.size() < b.vertices.size();
    return a.vertices < b.vertices;
  });
  return f;
}

struct Bar {
  std::size_t dim = 0;
  double birth = 0.0;
  double death = std::numeric_limits<double>::infinity();

  bool infinite() const noexcept { return std::isinf(death); }
  auto operator<=>(const Bar&) const = default;
};

struct Barcode {
  std::vector<Bar> bars;            // positive-length bars, sorted
  std::size_t max_dim = 0;          // highest dimension reported
  std::size_t zero_length_bars = 0; // pairs born and killed at the same value

  std::vector<Bar> in_dim(std::size_t k) const {
    std::vector<Bar> out;
    for (const auto& b : bars)
      if (b.dim == k) out.push_back(b);
    return out;
  }
};

struct ReductionOptions {
  bool clearing = false;
};

namespace detail {

struct VectorHash {
  std::size_t operator()(const std::vector<std::uint32_t>& v) const noexcept {
    std::size_t h = 1469598103934665603ULL;
    for (auto x : v) h = (h ^ x) * 1099511628211ULL;
    return h;
  }
};

/// Symmetric difference of two ascending index lists.
inline void add_column(std::vector<std::size_t>& target, const std::vector<std::size_t>& source) {
  std::vector<std::size_t> out;
  out.reserve(target.size() + source.size());
  std::set_symmetric_difference(target.begin(), target.end(), source.begin(), source.end(),
                                std::back_inserter(out));
  target.swap(out);
}

}  // namespace detail

/// Z/2 persistence by column reduction of the boundary matrix in filtration order.
inline Barcode persistent_homology(const Filtration& f, const ReductionOptions& opt = {}) {
  const std::size_t N = f.size();
  std::unordered_map<std::vector<std::uint32_t>, std::size_t, detail::VectorHash> index;
  index.reserve(N);
  for (std::size_t i = 0; i < N; ++i) index.emplace(f.simplices[i].vertices, i);

  std::vector<std::vector<std::size_t>> columns(N);
  for (std::size_t j = 0; j < N; ++j) {
    const auto& verts = f.simplices[j].vertices;
    if (verts.size() < 2) continue;
    auto& col = columns[j];
    std::vector<std::uint32_t> face(verts.size() - 1);
    for (std::size_t drop = 0; drop < verts.size(); ++drop) {
      std::size_t w = 0;
      for (std::size_t k = 0; k < verts.size(); ++k)
        if (k != drop) face[w++] = verts[k];
      const auto it = index.find(face);
      if (it == index.end()) throw std::logic_error("persistent_homology: filtration not closed");
      col.push_back(it->second);
    }
    std::sort(col.begin(), col.end());
  }

  constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> pivot_owner(N, kNone);  // row -> column whose low it is
  std::vector<bool> cleared(N, false);

  auto reduce = [&](std::size_t j) {
    auto& col = columns[j];
    while (!col.empty() && pivot_owner[col.back()] != kNone) {
      detail::add_column(col, columns[pivot_owner[col.back()]]);
    }
    if (!col.empty()) {
      pivot_owner[col.back()] = j;
      if (opt.clearing) {
        cleared[col.back()] = true;
        columns[col.back()].clear();
      }
    }
  };

  if (opt.clearing) {
    std::size_t top = 0;
    for (const auto& s : f.simplices) top = std::max(top, s.dim());
    for (std::size_t dim = top + 1; dim-- > 0;) {
      for (std::size_t j = 0; j < N; ++j) {
        if (f.simplices[j].dim() == dim && !cleared[j]) reduce(j);
      }
    }
  } else {
    for (std::size_t j = 0; j < N; ++j) reduce(j);
  }

  Barcode bc;
  bc.max_dim = f.max_dim;
  std::vector<bool> killed(N, false);
  for (std::size_t row = 0; row < N; ++row) {
    const std::size_t j = pivot_owner[row];
    if (j == kNone) continue;
    killed[row] = true;
    const double birth = f.simplices[row].value;
    const double death = f.simplices[j].value;
    if (death > birth) {
      bc.bars.push_back({f.simplices[row].dim(), birth, death});
    } else {
      ++bc.zero_length_bars;
    }
  }
  for (std::size_t j = 0; j < N; ++j) {
    const bool creator = columns[j].empty() && !cleared[j];
    if (creator && !killed[j]) bc.bars.push_back({f.simplices[j].dim(), f.simplices[j].value});
  }
  std::sort(bc.bars.begin(), bc.bars.end());
  return bc;
}

/// Bars alive at epsilon (birth <= eps < death), per dimension 0..max_dim.
inline std::vector<std::size_t> betti_at_scale(const Barcode& b, double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("betti_at_scale: epsilon must be >= 0");
  std::vector<std::size_t> betti(b.max_dim + 1, 0);
  for (const auto& bar : b.bars) {
    if (bar.dim <= b.max_dim && bar.birth <= epsilon && epsilon < bar.death) ++betti[bar.dim];
  }
  return betti;
}

/// Keep bars of dimension <= max_dim only.
inline Barcode truncate(Barcode b, std::size_t max_dim) {
  std::erase_if(b.bars, [&](const Bar& bar) { return bar.dim > max_dim; });
  b.max_dim = max_dim;
  return b;
}

/// Rips persistence with reliable bars up to homology dimension `max_dim`.
inline Barcode rips_persistence(const DistanceMatrix& d, std::size_t max_dim, double max_scale,
                                std::size_t simplex_cap = kDefaultSimplexCap) {
  return truncate(persistent_homology(rips_filtration(d, max_dim + 1, max_scale, simplex_cap)),
                  max_dim);
}

/// All-pairs shortest paths over the complete graph with the given edge weights
/// (dense Dijkstra per source), symmetrised.
inline DistanceMatrix shortest_path_completion(const Matrix& w, unsigned jobs = 1) {
  const Eigen::Index n = w.rows();
  Matrix out(n, n);
  auto run = [&](unsigned worker, unsigned stride) {
    std::vector<double> dist(static_cast<std::size_t>(n));
    std::vector<char> done(static_cast<std::size_t>(n));
    for (Eigen::Index s = worker; s < n; s += stride) {
      std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
      std::fill(done.begin(), done.end(), 0);
      dist[static_cast<std::size_t>(s)] = 0.0;
      for (Eigen::Index it = 0; it < n; ++it) {
        Eigen::Index u = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index v = 0; v < n; ++v) {
          if (!done[static_cast<std::size_t>(v)] && dist[static_cast<std::size_t>(v)] < best) {
            best = dist[static_cast<std::size_t>(v)];
            u = v;
          }
        }
        if (u < 0) break;
        done[static_cast<std::size_t>(u)] = 1;
        for (Eigen::Index v = 0; v < n; ++v) {
          const double cand = best + w(u, v);
          if (cand < dist[static_cast<std::size_t>(v)]) dist[static_cast<std::size_t>(v)] = cand;
        }
      }
      for (Eigen::Index v = 0; v < n; ++v) out(s, v) = dist[static_cast<std::size_t>(v)];
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<Eigen::Index>(n, 1))));
  if (jobs == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> threads;
    for (unsigned t = 0; t < jobs; ++t) threads.emplace_back(run, t, jobs);
    for (auto& t : threads) t.join();
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    out(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = std::min(out(i, j), out(j, i));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return DistanceMatrix(std::move(out));
}

/// Euclidean input-space distances with every overlap class collapsed to distance
/// zero, completed by shortest paths.
inline DistanceMatrix quotient_pseudometric(const Matrix& points, const OverlapDecomposition& od,
                                            unsigned jobs = 1) {
  Matrix w = pairwise_distances(points).matrix();
  const auto n = static_cast<std::size_t>(points.rows());
  for (const auto& cls : od.classes) {
    for (auto a : cls) {
      if (a >= n) throw std::out_of_range("quotient_pseudometric: class index beyond point set");
      for (auto b : cls) w(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = 0.0;
    }
  }
  if (od.empty()) return DistanceMatrix(std::move(w));
  return shortest_path_completion(w, jobs);
}

/// Geodesic distances on the symmetrised k-nearest-neighbour graph. Pairs in
/// different components get 10x the largest finite distance.
inline DistanceMatrix knn_geodesic_metric(const Matrix& points, std::size_t k) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (k < 1 || k >= n) throw std::invalid_argument("knn_geodesic_metric: need 1 <= k < n");
  const Matrix e = pairwise_distances(points).matrix();
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  std::vector<std::vector<char>> linked(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> order;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) <
             e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
    });
    for (std::size_t r = 0; r < k; ++r) {
      const std::size_t j = order[r];
      linked[i][j] = linked[j][i] = 1;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (linked[i][j]) adj[i].emplace_back(j, e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));

  const double inf = std::numeric_limits<double>::infinity();
  Matrix g = Matrix::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), inf);
  using Item = std::pair<double, std::size_t>;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<double> dist(n, inf);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[s] = 0.0;
    heap.emplace(0.0, s);
    while (!heap.empty()) {
      const auto [du, u] = heap.top();
      heap.pop();
      if (du > dist[u]) continue;
      for (const auto& [v, wt] : adj[u]) {
        if (du + wt < dist[v]) {
          dist[v] = du + wt;
          heap.emplace(dist[v], v);
        }
      }
    }
    for (std::size_t v = 0; v < n; ++v) g(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(v)) = dist[v];
  }
  double max_finite = 0.0;
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      if (std::isfinite(g(i, j))) max_finite = std::max(max_finite, g(i, j));
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    g(i, i) = 0.0;
    for (Eigen::Index j = i + 1; j < g.cols(); ++j) {
      double v = std::min(g(i, j), g(j, i));
      if (!std::isfinite(v)) v = 10.0 * max_finite;
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return DistanceMatrix(std::move(g));
}

/// Merge points at distance zero into one vertex each. Rips homology is unchanged.
inline DistanceMatrix collapse_zero_distance(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  std::vector<std::size_t> keep;
  std::vector<char> absorbed(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (absorbed[i]) continue;
    keep.push_back(i);
    for (std::size_t j = i + 1; j < n; ++j)
      if (d(i, j) == 0.0) absorbed[j] = 1;
  }
  if (keep.size() == n) return d;
  Matrix out(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t a = 0; a < keep.size(); ++a)
    for (std::size_t b = 0; b < keep.size(); ++b)
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = d(keep[a], keep[b]);
  return DistanceMatrix(std::move(out));
}

/// Persistent homology of the dataset modulo the overlap classes, in input space.
inline Barcode quotient_homology(const Matrix& points, const OverlapDecomposition& od,
                                 std::size_t max_dim, double max_scale,
                                 std::size_t simplex_cap = kDefaultSimplexCap, unsigned jobs = 1) {
  const auto d = collapse_zero_distance(quotient_pseudometric(points, od, jobs));
  return rips_persistence(d, max_dim, max_scale, simplex_cap);
}

}  // namespace ovh
