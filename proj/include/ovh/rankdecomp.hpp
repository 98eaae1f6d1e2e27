#pragma once

#include "ovh/polyhedra.hpp"

#include <map>
#include <vector>

namespace ovh {

/// Local rank of the affine map on the region of J.
inline std::size_t region_rank(const MLPNetwork& net, const GlobalCodeword& J, std::size_t layer,
                               double tol = kRankTolerance) {
  return numerical_rank(region_affine_map(net, J, layer).linear(), tol);
}

struct RankProfile {
  std::vector<std::pair<GlobalCodeword, std::size_t>> ranks;  // populated-region order
  std::map<std::size_t, std::size_t> histogram;              // rank -> region count

  /// Fraction of regions whose rank is below `dim`.
  double fraction_below(std::size_t dim) const {
    if (ranks.empty()) return 0.0;
    std::size_t low = 0;
    for (const auto& [code, r] : ranks) low += r < dim;
    return static_cast<double>(low) / static_cast<double>(ranks.size());
  }
};

inline RankProfile rank_profile(const MLPNetwork& net, const PopulatedDecomposition& decomp,
                                double tol = kRankTolerance) {
  RankProfile p;
  for (const auto& region : decomp.regions) {
    const auto r = region_rank(net, region.codeword, decomp.layer, tol);
    p.ranks.emplace_back(region.codeword, r);
    ++p.histogram[r];
  }
  return p;
}

/// One rank per populated region of `layer` on the dataset.
inline RankProfile rank_histogram(const MLPNetwork& net, const Matrix& data, std::size_t layer,
                                  double tol = kRankTolerance) {
  if (data.rows() == 0) return {};
  net.check_layer(layer);
  PopulatedDecomposition d;
  d.layer = layer;
  std::map<GlobalCodeword, bool> seen;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    auto code = global_codeword(net, data.row(i).transpose(), layer);
    if (seen.emplace(code, true).second) d.regions.push_back(Region{std::move(code), {}, {}});
  }
  return rank_profile(net, d, tol);
}

}  // namespace ovh
