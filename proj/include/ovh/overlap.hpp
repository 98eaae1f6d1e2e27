#pragma once

#include "ovh/polyhedra.hpp"
#include "ovh/union_find.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <thread>
#include <utility>
#include <vector>

namespace ovh {

using PointPair = std::pair<std::size_t, std::size_t>;

/// Gluing classes of dataset points. Only classes with at least two members are
/// stored; each class is sorted and classes are ordered by their smallest member.
struct OverlapDecomposition {
  std::vector<std::vector<std::size_t>> classes;
  std::vector<std::vector<GlobalCodeword>> class_regions;  // codewords involved per class

  std::size_t size() const noexcept { return classes.size(); }
  bool empty() const noexcept { return classes.empty(); }

  /// Class id per point (or -1 for singletons), for `n` points.
  std::vector<long> labels(std::size_t n) const {
    std::vector<long> out(n, -1);
    for (std::size_t c = 0; c < classes.size(); ++c) {
      for (auto p : classes[c]) {
        if (p < n) out[p] = static_cast<long>(c);
      }
    }
    return out;
  }

  bool operator==(const OverlapDecomposition& other) const { return classes == other.classes; }
};

struct OverlapOptions {
  double delta = 1.0;
  double tol = kFeasibilityTolerance;
  unsigned jobs = 0;  // 0: hardware concurrency
};

namespace detail {

inline unsigned resolve_jobs(unsigned jobs) {
  if (jobs != 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Points of `from` whose image has a preimage inside `to` (LP feasibility),
/// restricted to points passing the output-space delta prefilter.
inline std::vector<std::size_t> feasible_points(const Region& from, const AffineMap& from_map,
                                                const Region& to, const AffineMap& to_map,
                                                const Matrix& data, const Matrix& outputs,
                                                const OverlapOptions& opt) {
  std::vector<std::size_t> hits;
  const Vector anchor = data.row(static_cast<Eigen::Index>(to.points.front())).transpose();
  FeasibilityProblem lp{to.polyhedron.A, to.polyhedron.b, to_map.linear(), Vector()};
  for (auto y : from.points) {
    const auto yi = static_cast<Eigen::Index>(y);
    bool near = false;
    for (auto z : to.points) {
      if ((outputs.row(yi) - outputs.row(static_cast<Eigen::Index>(z))).norm() <= opt.delta) {
        near = true;
        break;
      }
    }
    if (!near) continue;
    lp.b_eq = from_map(data.row(yi).transpose()) - to_map.offset();
    if (solve_feasibility(lp, opt.tol, anchor).feasible()) hits.push_back(y);
  }
  return hits;
}

}  // namespace detail

/// Overlap detection between every pair of populated regions: LP feasibility of
/// { x in P_j, Phi_j(x) = Phi_i(y) } for prefiltered y, in both directions, with
/// the feasible sets of a region pair crossed into point pairs. The result is
/// sorted and free of duplicates.
inline std::vector<PointPair> detect_overlap_pairs(const MLPNetwork& net, std::size_t layer,
                                                   const PopulatedDecomposition& decomp,
                                                   const Matrix& data,
                                                   const OverlapOptions& opt = {}) {
  if (!(opt.delta > 0.0)) throw std::invalid_argument("detect_overlap_pairs: delta must be > 0");
  if (decomp.layer != layer) {
    throw std::invalid_argument("detect_overlap_pairs: decomposition built for layer " +
                                std::to_string(decomp.layer));
  }
  const Matrix outputs = layer_outputs(net, data, layer);
  std::vector<AffineMap> maps;
  maps.reserve(decomp.size());
  for (const auto& r : decomp.regions) maps.push_back(region_affine_map(net, r.codeword, layer));

  std::vector<std::pair<std::size_t, std::size_t>> region_pairs;
  for (std::size_t i = 0; i < decomp.size(); ++i)
    for (std::size_t j = i + 1; j < decomp.size(); ++j) region_pairs.emplace_back(i, j);

  const unsigned jobs = std::min<unsigned>(detail::resolve_jobs(opt.jobs),
                                           std::max<std::size_t>(region_pairs.size(), 1));
  std::vector<std::vector<PointPair>> partial(jobs);
  std::vector<std::exception_ptr> errors(jobs);
  auto work = [&](unsigned w) {
    try {
      for (std::size_t k = w; k < region_pairs.size(); k += jobs) {
        const auto [i, j] = region_pairs[k];
        const auto& Pi = decomp.regions[i];
        const auto& Pj = decomp.regions[j];
        std::vector<std::size_t> by, bz;
        try {
          by = detail::feasible_points(Pi, maps[i], Pj, maps[j], data, outputs, opt);
          bz = detail::feasible_points(Pj, maps[j], Pi, maps[i], data, outputs, opt);
        } catch (const SolverStall& e) {
          throw SolverStall(std::string(e.what()) + " (regions " + std::to_string(i) + " and " +
                            std::to_string(j) + ")");
        }
        for (auto y : by)
          for (auto z : bz) partial[w].emplace_back(std::min(y, z), std::max(y, z));
      }
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  if (jobs == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < jobs; ++w) threads.emplace_back(work, w);
    for (auto& t : threads) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<PointPair> pairs;
  for (auto& p : partial) pairs.insert(pairs.end(), p.begin(), p.end());
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  return pairs;
}

/// Transitive closure of the pairs (classes only; no region information).
inline OverlapDecomposition merge_to_decomposition(const std::vector<PointPair>& pairs) {
  OverlapDecomposition od;
  if (pairs.empty()) return od;
  std::size_t n = 0;
  for (const auto& [a, b] : pairs) n = std::max({n, a + 1, b + 1});
  UnionFind uf(n);
  for (const auto& [a, b] : pairs) uf.unite(a, b);
  std::map<std::size_t, std::vector<std::size_t>> by_root;
  for (std::size_t i = 0; i < n; ++i) by_root[uf.find(i)].push_back(i);
  for (auto& [root, members] : by_root) {
    if (members.size() > 1) od.classes.push_back(std::move(members));
  }
  std::sort(od.classes.begin(), od.classes.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return od;
}

/// Attach the codewords of the regions each class touches.
inline void attach_regions(OverlapDecomposition& od, const PopulatedDecomposition& decomp) {
  od.class_regions.clear();
  for (const auto& cls : od.classes) {
    std::vector<std::size_t> ids;
    for (auto p : cls) ids.push_back(decomp.region_of_point.at(p));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::vector<GlobalCodeword> codes;
    for (auto r : ids) codes.push_back(decomp.regions[r].codeword);
    od.class_regions.push_back(std::move(codes));
  }
}

inline OverlapDecomposition overlap_decomposition(const MLPNetwork& net, std::size_t layer,
                                                  const PopulatedDecomposition& decomp,
                                                  const Matrix& data,
                                                  const OverlapOptions& opt = {}) {
  auto od = merge_to_decomposition(detect_overlap_pairs(net, layer, decomp, data, opt));
  attach_regions(od, decomp);
  return od;
}

/// Full pipeline: populated decomposition, pairwise LP detection, union-find.
inline OverlapDecomposition overlap_decomposition(const MLPNetwork& net, std::size_t layer,
                                                  const Matrix& data, const BoundingBox& box,
                                                  const OverlapOptions& opt = {}) {
  const auto decomp = populate_decomposition(net, data, layer, box);
  return overlap_decomposition(net, layer, decomp, data, opt);
}

struct OverlapStatistics {
  std::size_t n_classes = 0;
  std::vector<std::size_t> class_sizes;
  std::vector<std::vector<double>> region_volumes;  // per class, per involved region
};

inline OverlapStatistics overlap_statistics(const OverlapDecomposition& od,
                                            const PopulatedDecomposition& decomp,
                                            std::size_t volume_samples, std::uint64_t seed) {
  OverlapStatistics s;
  s.n_classes = od.size();
  std::map<std::size_t, double> cache;
  for (std::size_t c = 0; c < od.size(); ++c) {
    s.class_sizes.push_back(od.classes[c].size());
    std::vector<double> vols;
    std::vector<std::size_t> ids;
    for (auto p : od.classes[c]) ids.push_back(decomp.region_of_point.at(p));
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (auto r : ids) {
      auto it = cache.find(r);
      if (it == cache.end()) {
        it = cache.emplace(r, estimate_volume(decomp.regions[r].polyhedron, volume_samples,
                                              seed + r)).first;
      }
      vols.push_back(it->second);
    }
    s.region_volumes.push_back(std::move(vols));
  }
  return s;
}

}  // namespace ovh
