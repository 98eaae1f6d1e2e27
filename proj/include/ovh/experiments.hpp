#pragma once

#include "ovh/datasets.hpp"
#include "ovh/homology.hpp"
#include "ovh/io.hpp"
#include "ovh/overlap.hpp"
#include "ovh/rankdecomp.hpp"
#include "ovh/train.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ovh {

/// {n_in, width x hidden, n_out}
inline std::vector<std::size_t> mlp_shape(std::size_t n_in, std::size_t width, std::size_t hidden,
                                          std::size_t n_out) {
  std::vector<std::size_t> s{n_in};
  s.insert(s.end(), hidden, width);
  s.push_back(n_out);
  return s;
}

inline MLPNetwork init_network(const std::string& scheme, const std::vector<std::size_t>& shape,
                               std::uint64_t seed) {
  if (scheme == "kaiming") return init_kaiming(shape, seed);
  if (scheme == "orthogonal") return init_orthogonal(shape, seed);
  throw std::invalid_argument("unknown init scheme '" + scheme + "' (kaiming, orthogonal)");
}

inline double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

/// Distinct populated regions touched by any overlap class.
inline std::vector<std::size_t> overlap_region_ids(const OverlapDecomposition& od,
                                                   const PopulatedDecomposition& decomp) {
  std::vector<std::size_t> ids;
  for (const auto& cls : od.classes)
    for (auto p : cls) ids.push_back(decomp.region_of_point.at(p));
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

/// Wall-clock stopwatch for bundle timings.
class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------------------
// Curves

struct CurvesConfig {
  std::size_t n = 500;
  std::size_t width = 50;
  std::size_t hidden = 3;
  double learning_rate = 1e-4;
  std::size_t epochs = 1000;
  double stop_mse = 2e-5;
  double delta = 1.0;
  double box = kDefaultBoxHalfWidth;
  double epsilon = 0.1;
  std::size_t max_dim = 1;
  std::size_t simplex_cap = kDefaultSimplexCap;
  std::optional<double> a, b;  // drawn per seed when unset
  unsigned jobs = 1;
};

struct CurveTrial {
  std::uint64_t seed = 0;
  double a = 0.0, b = 0.0;
  LabeledDataset data;
  TrainResult training;
  PopulatedDecomposition decomposition;
  OverlapDecomposition overlap;
  Barcode persistent;  // Euclidean, on the network outputs
  Barcode quotient;    // on the inputs modulo the overlap classes
  std::vector<std::size_t> persistent_betti, quotient_betti;
  bool persistent_capped = false;  // output complex hit the simplex cap; persistent fields empty
};

inline CurveTrial run_curve_trial(const CurvesConfig& cfg, std::uint64_t seed) {
  CurveTrial t;
  t.seed = seed;
  t.data = cfg.a && cfg.b ? gen_curve(*cfg.a, *cfg.b, cfg.n) : gen_random_curve(cfg.n, seed);
  t.a = t.data.metadata.parameters.at("a");
  t.b = t.data.metadata.parameters.at("b");
  TrainConfig tc;
  tc.loss = Loss::MeanSquaredError;
  tc.learning_rate = cfg.learning_rate;
  tc.epochs = cfg.epochs;
  tc.stop = StopCriterion{StopCriterion::Kind::LossBelow, cfg.stop_mse};
  tc.seed = seed;
  t.training = train(init_kaiming(mlp_shape(2, cfg.width, cfg.hidden, 2), seed), t.data.inputs,
                     t.data.targets, tc);
  const auto& net = t.training.network;
  const std::size_t L = net.depth();
  t.decomposition = populate_decomposition(net, t.data.inputs, L, BoundingBox::symmetric(2, cfg.box));
  t.overlap = overlap_decomposition(net, L, t.decomposition, t.data.inputs,
                                    {cfg.delta, kFeasibilityTolerance, cfg.jobs});
  t.quotient = quotient_homology(t.data.inputs, t.overlap, cfg.max_dim, cfg.epsilon, cfg.simplex_cap,
                                 cfg.jobs);
  t.quotient_betti = betti_at_scale(t.quotient, cfg.epsilon);
  const Matrix out = layer_outputs(net, t.data.inputs, L);
  try {
    t.persistent = rips_persistence(pairwise_distances(out), cfg.max_dim, cfg.epsilon, cfg.simplex_cap);
    t.persistent_betti = betti_at_scale(t.persistent, cfg.epsilon);
  } catch (const ResourceCapError&) {
    t.persistent_capped = true;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Spheres: overlap statistics before and after training

struct SpheresConfig {
  std::size_t d = 1;
  std::size_t n_per_sphere = 125;
  std::uint64_t data_seed = 0;
  std::size_t width = 25;
  std::size_t hidden = 4;
  std::string init = "kaiming";
  double learning_rate = 2e-5;
  std::size_t epochs = 1000;
  double delta = 1.0;
  double box = kDefaultBoxHalfWidth;
  std::size_t volume_samples = 2000;
  unsigned jobs = 1;
};

struct SpheresSnapshot {
  std::size_t n_regions = 0;
  std::size_t n_classes = 0;
  std::size_t n_overlap_regions = 0;
  std::vector<double> region_volumes;  // per populated region
  std::vector<char> in_overlap;        // per populated region
  double median_overlap_volume = std::numeric_limits<double>::quiet_NaN();
  double median_region_volume = std::numeric_limits<double>::quiet_NaN();
};

struct SpheresTrial {
  std::uint64_t seed = 0;
  SpheresSnapshot before, after;
  double final_loss = 0.0;
  double final_accuracy = 0.0;
  std::vector<RankProfile> ranks;  // trained network, layers 1..L
};

inline SpheresSnapshot spheres_snapshot(const MLPNetwork& net, const Matrix& x,
                                        const SpheresConfig& cfg, std::uint64_t seed) {
  SpheresSnapshot s;
  const std::size_t L = net.depth();
  const auto decomp = populate_decomposition(net, x, L, BoundingBox::symmetric(x.cols(), cfg.box));
  const auto od = overlap_decomposition(net, L, decomp, x, {cfg.delta, kFeasibilityTolerance, cfg.jobs});
  const auto involved = overlap_region_ids(od, decomp);
  s.n_regions = decomp.size();
  s.n_classes = od.size();
  s.n_overlap_regions = involved.size();
  s.in_overlap.assign(decomp.size(), 0);
  for (auto r : involved) s.in_overlap[r] = 1;
  std::vector<double> overlap_vols;
  for (std::size_t r = 0; r < decomp.size(); ++r) {
    s.region_volumes.push_back(estimate_volume(decomp.regions[r].polyhedron, cfg.volume_samples, seed + r));
    if (s.in_overlap[r]) overlap_vols.push_back(s.region_volumes.back());
  }
  s.median_overlap_volume = median(overlap_vols);
  s.median_region_volume = median(s.region_volumes);
  return s;
}

inline LabeledDataset spheres_data(const SpheresConfig& cfg) {
  return gen_concentric_spheres(cfg.d, cfg.n_per_sphere, cfg.data_seed);
}

inline SpheresTrial run_spheres_trial(const SpheresConfig& cfg, const LabeledDataset& data,
                                      std::uint64_t seed) {
  SpheresTrial t;
  t.seed = seed;
  const auto net0 = init_network(cfg.init, mlp_shape(cfg.d + 1, cfg.width, cfg.hidden, 2), seed);
  t.before = spheres_snapshot(net0, data.inputs, cfg, seed);
  TrainConfig tc;
  tc.loss = Loss::CrossEntropy;
  tc.learning_rate = cfg.learning_rate;
  tc.epochs = cfg.epochs;
  tc.seed = seed;
  const auto trained = train(net0, data.inputs, data.targets, tc);
  t.final_loss = trained.final_loss;
  t.final_accuracy = trained.final_accuracy;
  t.after = spheres_snapshot(trained.network, data.inputs, cfg, seed);
  for (std::size_t l = 1; l <= trained.network.depth(); ++l)
    t.ranks.push_back(rank_histogram(trained.network, data.inputs, l));
  return t;
}

// ---------------------------------------------------------------------------
// Propagation: per-layer Betti numbers, quotient vs k-NN persistent

struct PropagationConfig {
  TopologyKind kind = TopologyKind::Circle;
  std::size_t n = 200;
  double noise = 0.0;
  std::uint64_t data_seed = 0;
  std::size_t width = 15;
  std::size_t hidden = 9;
  double learning_rate = 2e-5;
  std::size_t epochs = 5000;
  double stop_accuracy = 0.999;
  double delta = 10.0;
  double box = kDefaultBoxHalfWidth;
  std::size_t knn = 10;
  double epsilon_persistent = 0.5;
  double epsilon_quotient = 0.3;
  std::size_t max_dim = 1;
  bool exclude_misclassified = true;
  unsigned jobs = 1;
};

struct PropagationLayer {
  std::size_t layer = 0;  // 0 = input
  std::vector<std::size_t> persistent_betti, quotient_betti;
  std::size_t n_regions = 0;
  std::size_t n_classes = 0;
  RankProfile ranks;
};

struct PropagationTrial {
  std::uint64_t seed = 0;
  double final_accuracy = 0.0;
  std::size_t epochs_run = 0;
  std::size_t excluded = 0;
  std::size_t manifold_points = 0;
  std::vector<PropagationLayer> layers;
};

inline LabeledDataset propagation_data(const PropagationConfig& cfg) {
  return gen_known_topology(cfg.kind, cfg.n, cfg.noise, cfg.data_seed, true);
}

inline PropagationTrial run_propagation_trial(const PropagationConfig& cfg, const LabeledDataset& data,
                                              std::uint64_t seed) {
  PropagationTrial t;
  t.seed = seed;
  TrainConfig tc;
  tc.loss = Loss::CrossEntropy;
  tc.learning_rate = cfg.learning_rate;
  tc.epochs = cfg.epochs;
  tc.stop = StopCriterion{StopCriterion::Kind::AccuracyAbove, cfg.stop_accuracy};
  tc.seed = seed;
  const auto trained = train(init_kaiming(mlp_shape(2, cfg.width, cfg.hidden, 2), seed), data.inputs,
                             data.targets, tc);
  const auto& net = trained.network;
  t.final_accuracy = trained.final_accuracy;
  t.epochs_run = trained.loss_history.size();

  std::vector<std::size_t> rows;
  const auto predicted = predict_classes(net, data.inputs);
  for (auto r : data.rows_with_label(0)) {
    if (cfg.exclude_misclassified && predicted[r] != 0) {
      ++t.excluded;
      continue;
    }
    rows.push_back(r);
  }
  t.manifold_points = rows.size();
  if (rows.size() <= cfg.knn) {
    throw NumericError("propagation: only " + std::to_string(rows.size()) +
                       " correctly classified manifold points remain");
  }
  const Matrix m = select_rows(data.inputs, rows);
  const auto box = BoundingBox::symmetric(2, cfg.box);

  PropagationLayer input;
  input.persistent_betti =
      betti_at_scale(rips_persistence(knn_geodesic_metric(m, cfg.knn), cfg.max_dim, cfg.epsilon_persistent),
                     cfg.epsilon_persistent);
  input.quotient_betti = betti_at_scale(
      quotient_homology(m, OverlapDecomposition{}, cfg.max_dim, cfg.epsilon_quotient), cfg.epsilon_quotient);
  t.layers.push_back(std::move(input));

  for (std::size_t l = 1; l <= net.depth(); ++l) {
    PropagationLayer pl;
    pl.layer = l;
    const Matrix rep = layer_outputs(net, m, l);
    pl.persistent_betti = betti_at_scale(
        rips_persistence(knn_geodesic_metric(rep, cfg.knn), cfg.max_dim, cfg.epsilon_persistent),
        cfg.epsilon_persistent);
    const auto decomp = populate_decomposition(net, m, l, box);
    const auto od = overlap_decomposition(net, l, decomp, m, {cfg.delta, kFeasibilityTolerance, cfg.jobs});
    pl.quotient_betti = betti_at_scale(
        quotient_homology(m, od, cfg.max_dim, cfg.epsilon_quotient, kDefaultSimplexCap, cfg.jobs),
        cfg.epsilon_quotient);
    pl.n_regions = decomp.size();
    pl.n_classes = od.size();
    pl.ranks = rank_profile(net, decomp);
    t.layers.push_back(std::move(pl));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Expressivity sweep: populated regions and overlap classes at initialisation

struct SweepConfig {
  std::vector<std::size_t> widths{10, 25, 50};
  std::vector<std::size_t> depths{2, 3, 4};
  std::size_t d = 1;
  std::size_t n_per_sphere = 125;
  std::uint64_t data_seed = 0;
  std::string init = "kaiming";
  double delta = 1.0;
  double box = kDefaultBoxHalfWidth;
  unsigned jobs = 1;
};

struct SweepCell {
  std::size_t width = 0, depth = 0;
  std::uint64_t seed = 0;
  std::size_t n_regions = 0, n_classes = 0, n_overlap_regions = 0;
};

inline SweepCell run_sweep_cell(const SweepConfig& cfg, const LabeledDataset& data, std::size_t width,
                                std::size_t depth, std::uint64_t seed) {
  SweepCell c{width, depth, seed};
  const auto net = init_network(cfg.init, mlp_shape(cfg.d + 1, width, depth, 2), seed);
  const std::size_t L = net.depth();
  const auto decomp = populate_decomposition(net, data.inputs, L, BoundingBox::symmetric(data.inputs.cols(), cfg.box));
  const auto od = overlap_decomposition(net, L, decomp, data.inputs, {cfg.delta, kFeasibilityTolerance, cfg.jobs});
  c.n_regions = decomp.size();
  c.n_classes = od.size();
  c.n_overlap_regions = overlap_region_ids(od, decomp).size();
  return c;
}

// ---------------------------------------------------------------------------
// Result bundles: one directory of CSV files, each starting with the config echo.
// timings.txt is the only file that differs between identical runs.

class ResultBundle {
 public:
  ResultBundle(std::filesystem::path dir, RunConfig cfg) : dir_(std::move(dir)), cfg_(std::move(cfg)) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create '" + dir_.string() + "': " + ec.message());
  }

  /// Adds a CSV table; `header` is the column line.
  std::ofstream table(const std::string& name, const std::string& header) {
    auto out = detail::open_out((dir_ / name).string());
    cfg_.write(out);
    out << header << '\n';
    files_.push_back(name);
    return out;
  }

  void fail(const std::string& what, bool resource_cap = false) {
    failures_.push_back(what);
    capped_ = capped_ || resource_cap;
  }
  void time(const std::string& what, double seconds) { timings_.emplace_back(what, seconds); }
  bool ok() const noexcept { return failures_.empty(); }
  bool capped() const noexcept { return capped_; }
  const std::vector<std::string>& failures() const noexcept { return failures_; }

  void finish() {
    auto m = detail::open_out((dir_ / "manifest.txt").string());
    cfg_.write(m);
    for (const auto& f : files_) m << "file " << f << '\n';
    for (const auto& f : failures_) m << "failed " << f << '\n';
    m << "status " << (failures_.empty() ? "complete" : "partial") << '\n';
    auto t = detail::open_out((dir_ / "timings.txt").string());
    for (const auto& [what, s] : timings_) t << what << ' ' << format_double(s) << '\n';
  }

 private:
  std::filesystem::path dir_;
  RunConfig cfg_;
  std::vector<std::string> files_;
  std::vector<std::string> failures_;
  std::vector<std::pair<std::string, double>> timings_;
  bool capped_ = false;
};

namespace detail {

inline std::string join(const std::vector<std::size_t>& v, std::size_t width) {
  std::string s;
  for (std::size_t k = 0; k < width; ++k) {
    if (k) s += ',';
    if (k < v.size()) s += std::to_string(v[k]);
  }
  return s;
}

inline std::string betti_columns(const std::string& prefix, std::size_t max_dim) {
  std::string s;
  for (std::size_t k = 0; k <= max_dim; ++k) s += (k ? "," : "") + prefix + std::to_string(k);
  return s;
}

inline void write_bars(std::ostream& os, std::uint64_t seed, const std::string& kind, const Barcode& b) {
  for (const auto& bar : b.bars)
    os << seed << ',' << kind << ',' << bar.dim << ',' << format_double(bar.birth) << ','
       << format_double(bar.death) << '\n';
}

template <class Fn>
void guarded(ResultBundle& bundle, const std::string& what, Fn&& fn) {
  try {
    fn();
  } catch (const ResourceCapError& e) {
    bundle.fail(what + ": " + e.what(), true);
  } catch (const std::exception& e) {
    bundle.fail(what + ": " + e.what());
  }
}

}  // namespace detail

inline void write_curves_bundle(ResultBundle& bundle, const CurvesConfig& cfg,
                                const std::vector<std::uint64_t>& seeds) {
  auto summary = bundle.table("curves.csv", "seed,a,b,final_loss,epochs,n_regions,n_classes," +
                                                detail::betti_columns("persistent_b", cfg.max_dim) + "," +
                                                detail::betti_columns("quotient_b", cfg.max_dim));
  auto bars = bundle.table("barcodes.csv", "seed,kind,dim,birth,death");
  auto parts = bundle.table("partition.csv", "seed,class,point");
  for (auto seed : seeds) {
    detail::guarded(bundle, "seed " + std::to_string(seed), [&] {
      Stopwatch sw;
      const auto t = run_curve_trial(cfg, seed);
      if (t.persistent_capped) bundle.fail("seed " + std::to_string(seed) + ": persistent barcode over simplex cap", true);
      summary << seed << ',' << format_double(t.a) << ',' << format_double(t.b) << ','
              << format_double(t.training.final_loss) << ',' << t.training.loss_history.size() << ','
              << t.decomposition.size() << ',' << t.overlap.size() << ','
              << detail::join(t.persistent_betti, cfg.max_dim + 1) << ','
              << detail::join(t.quotient_betti, cfg.max_dim + 1) << '\n';
      detail::write_bars(bars, seed, "persistent", t.persistent);
      detail::write_bars(bars, seed, "quotient", t.quotient);
      for (std::size_t c = 0; c < t.overlap.size(); ++c)
        for (auto p : t.overlap.classes[c]) parts << seed << ',' << c << ',' << p << '\n';
      bundle.time("seed " + std::to_string(seed), sw.seconds());
    });
  }
}

inline void write_spheres_bundle(ResultBundle& bundle, const SpheresConfig& cfg,
                                 const std::vector<std::uint64_t>& seeds) {
  const auto data = spheres_data(cfg);
  auto summary = bundle.table("overlap.csv",
                              "seed,phase,n_regions,n_classes,n_overlap_regions,median_overlap_volume,"
                              "median_region_volume");
  auto vols = bundle.table("volumes.csv", "seed,phase,region,volume,in_overlap");
  auto ranks = bundle.table("ranks.csv", "seed,layer,rank,count");
  auto training = bundle.table("training.csv", "seed,final_loss,final_accuracy");
  for (auto seed : seeds) {
    detail::guarded(bundle, "seed " + std::to_string(seed), [&] {
      Stopwatch sw;
      const auto t = run_spheres_trial(cfg, data, seed);
      for (const auto* snap : {&t.before, &t.after}) {
        const char* phase = snap == &t.before ? "before" : "after";
        summary << seed << ',' << phase << ',' << snap->n_regions << ',' << snap->n_classes << ','
                << snap->n_overlap_regions << ',' << format_double(snap->median_overlap_volume) << ','
                << format_double(snap->median_region_volume) << '\n';
        for (std::size_t r = 0; r < snap->region_volumes.size(); ++r)
          vols << seed << ',' << phase << ',' << r << ',' << format_double(snap->region_volumes[r]) << ','
               << int(snap->in_overlap[r]) << '\n';
      }
      for (std::size_t l = 0; l < t.ranks.size(); ++l)
        for (const auto& [rank, count] : t.ranks[l].histogram)
          ranks << seed << ',' << l + 1 << ',' << rank << ',' << count << '\n';
      training << seed << ',' << format_double(t.final_loss) << ',' << format_double(t.final_accuracy) << '\n';
      bundle.time("seed " + std::to_string(seed), sw.seconds());
    });
  }
}

inline void write_propagation_bundle(ResultBundle& bundle, const PropagationConfig& cfg,
                                     const std::vector<std::uint64_t>& seeds) {
  const auto data = propagation_data(cfg);
  auto betti = bundle.table("betti.csv", "seed,layer,n_regions,n_classes," +
                                             detail::betti_columns("persistent_b", cfg.max_dim) + "," +
                                             detail::betti_columns("quotient_b", cfg.max_dim));
  auto ranks = bundle.table("ranks.csv", "seed,layer,rank,count");
  auto training = bundle.table("training.csv", "seed,final_accuracy,epochs,excluded,manifold_points");
  for (auto seed : seeds) {
    detail::guarded(bundle, "seed " + std::to_string(seed), [&] {
      Stopwatch sw;
      const auto t = run_propagation_trial(cfg, data, seed);
      for (const auto& l : t.layers) {
        betti << seed << ',' << l.layer << ',' << l.n_regions << ',' << l.n_classes << ','
              << detail::join(l.persistent_betti, cfg.max_dim + 1) << ','
              << detail::join(l.quotient_betti, cfg.max_dim + 1) << '\n';
        for (const auto& [rank, count] : l.ranks.histogram)
          ranks << seed << ',' << l.layer << ',' << rank << ',' << count << '\n';
      }
      training << seed << ',' << format_double(t.final_accuracy) << ',' << t.epochs_run << ','
               << t.excluded << ',' << t.manifold_points << '\n';
      bundle.time("seed " + std::to_string(seed), sw.seconds());
    });
  }
}

inline void write_sweep_bundle(ResultBundle& bundle, const SweepConfig& cfg,
                               const std::vector<std::uint64_t>& seeds) {
  const auto data = gen_concentric_spheres(cfg.d, cfg.n_per_sphere, cfg.data_seed);
  auto grid = bundle.table("sweep.csv", "width,depth,seed,n_regions,n_classes,n_overlap_regions");
  for (auto w : cfg.widths)
    for (auto dep : cfg.depths)
      for (auto seed : seeds) {
        const std::string what = "width " + std::to_string(w) + " depth " + std::to_string(dep) +
                                 " seed " + std::to_string(seed);
        detail::guarded(bundle, what, [&] {
          Stopwatch sw;
          const auto c = run_sweep_cell(cfg, data, w, dep, seed);
          grid << c.width << ',' << c.depth << ',' << c.seed << ',' << c.n_regions << ',' << c.n_classes
               << ',' << c.n_overlap_regions << '\n';
          bundle.time(what, sw.seconds());
        });
      }
}

}  // namespace ovh
