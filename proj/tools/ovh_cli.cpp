// ovh: command-line front end for decompositions, overlap detection and
// quotient homology of ReLU networks.

#include "ovh/ovh.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace ovh;
namespace fs = std::filesystem;

enum ExitCode { kOk = 0, kUsage = 1, kNumeric = 2, kResourceCap = 3 };

std::string to_config(const std::string& v) { return v; }
std::string to_config(double v) { return format_double(v); }
std::string to_config(bool v) { return v ? "true" : "false"; }
template <class T>
  requires std::is_integral_v<T>
std::string to_config(T v) {
  return std::to_string(v);
}
std::string to_config(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

/// Options of one subcommand; every registered option is echoed into the result.
class Command {
 public:
  Command(CLI::App& parent, const std::string& name, const std::string& help)
      : app_(parent.add_subcommand(name, help)) {}

  CLI::App* app() const { return app_; }

  template <class T>
  CLI::Option* add(const std::string& name, T& var, const std::string& help) {
    auto* o = app_->add_option("--" + name, var, help)->capture_default_str();
    record_.push_back([name, &var](RunConfig& c) { c.values[name] = to_config(var); });
    return o;
  }

  /// Recorded only when set (NaN means unset).
  CLI::Option* add_optional(const std::string& name, double& var, const std::string& help) {
    auto* o = app_->add_option("--" + name, var, help);
    record_.push_back([name, &var](RunConfig& c) {
      if (!std::isnan(var)) c.values[name] = format_double(var);
    });
    return o;
  }

  RunConfig config(const std::string& command) const {
    RunConfig c;
    c.command = command;
    for (const auto& r : record_) r(c);
    return c;
  }

  bool given(const std::string& name) const { return app_->count("--" + name) > 0; }

 private:
  CLI::App* app_;
  std::vector<std::function<void(RunConfig&)>> record_;
};

fs::path output_path(const std::string& out) {
  fs::path p(out);
  if (p.is_relative()) {
    if (const char* dir = std::getenv("OVH_OUTPUT_DIR"); dir && *dir) p = fs::path(dir) / p;
  }
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p;
}

std::vector<std::size_t> parse_arch(const std::string& s) {
  std::vector<std::size_t> shape;
  std::stringstream in(s);
  for (std::string tok; std::getline(in, tok, ',');) {
    try {
      shape.push_back(std::stoul(tok));
    } catch (const std::exception&) {
      throw std::invalid_argument("--arch: '" + tok + "' is not a layer width");
    }
  }
  if (shape.size() < 2) throw std::invalid_argument("--arch needs at least input and output sizes");
  return shape;
}

Matrix select_label(const LabeledDataset& ds, int label) {
  if (label < 0) return ds.inputs;
  return select_rows(ds.inputs, ds.rows_with_label(label));
}

std::size_t resolve_layer(std::size_t layer, const MLPNetwork& net) {
  return layer == 0 ? net.depth() : layer;
}

struct Cli {
  CLI::App app{"Polyhedral, rank and overlap decompositions of ReLU networks; quotient homology."};
  unsigned jobs = 1;
  std::function<int()> action;

  // gen-data
  std::string gd_kind = "curve";
  std::size_t gd_n = 500;
  double gd_a = std::nan(""), gd_b = std::nan("");
  std::size_t gd_d = 1;
  double gd_noise = 0.0;
  std::uint64_t gd_seed = 0;
  bool gd_complement = false;
  std::string gd_out = "data.csv";

  // train
  std::string tr_data, tr_arch, tr_preset, tr_loss = "mse", tr_optimizer = "adam", tr_init = "kaiming";
  double tr_lr = 1e-3;
  std::size_t tr_epochs = 100;
  double tr_stop_loss = 0.0, tr_stop_accuracy = 0.0;
  std::uint64_t tr_seed = 0;
  std::string tr_out = "weights.txt";

  // decompose
  std::string dc_weights, dc_data, dc_out = "regions.csv";
  std::size_t dc_layer = 0;
  double dc_bbox = kDefaultBoxHalfWidth, dc_rank_tol = kRankTolerance;
  int dc_label = -1;

  // overlap
  std::string ov_weights, ov_data, ov_preset, ov_out = "partition.csv";
  std::size_t ov_layer = 0;
  double ov_delta = 1.0, ov_bbox = kDefaultBoxHalfWidth, ov_tol = kFeasibilityTolerance;
  int ov_label = -1;

  // homology
  std::string hm_data, hm_partition, hm_weights, hm_out = "barcode.csv";
  std::size_t hm_knn = 0, hm_layer = 0, hm_max_dim = 1, hm_cap = kDefaultSimplexCap;
  double hm_max_scale = std::nan(""), hm_epsilon = std::nan("");
  int hm_label = -1;

  // experiments
  std::size_t ex_seeds = 10;
  std::uint64_t ex_first_seed = 0;
  std::string ex_out = "bundle";
  CurvesConfig curves;
  double curves_a = std::nan(""), curves_b = std::nan("");
  SpheresConfig spheres;
  PropagationConfig prop;
  std::string prop_kind = "circle";
  SweepConfig sweep;

  // replay
  std::string rp_file, rp_out;

  std::vector<std::unique_ptr<Command>> commands;

  Command& command(CLI::App& parent, const std::string& name, const std::string& help) {
    commands.push_back(std::make_unique<Command>(parent, name, help));
    auto& c = *commands.back();
    c.app()->add_option("--jobs", jobs, "worker threads for LP batches and shortest paths")
        ->capture_default_str();
    return c;
  }

  Cli() {
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML/INI file with option defaults (flags override it)");
    build_gen_data();
    build_train();
    build_decompose();
    build_overlap();
    build_homology();
    build_experiments();
    build_replay();
  }

  void build_gen_data() {
    auto& c = command(app, "gen-data", "write a synthetic dataset");
    c.add("kind", gd_kind, "curve | spheres | circle | annulus-cloud | wedge-of-circles | interval");
    c.add("n", gd_n, "points (per sphere for spheres)");
    c.add_optional("a", gd_a, "curve parameter a (random when unset)");
    c.add_optional("b", gd_b, "curve parameter b (random when unset)");
    c.add("d", gd_d, "sphere dimension");
    c.add("noise", gd_noise, "Gaussian noise for known-topology clouds");
    c.add("seed", gd_seed, "random seed");
    c.add("complement", gd_complement, "append a class-1 blob to known-topology clouds");
    c.app()->add_option("--out", gd_out, "output CSV")->capture_default_str();
    action_for(c, [this, &c] {
      LabeledDataset ds;
      if (gd_kind == "curve") {
        if (std::isnan(gd_a) != std::isnan(gd_b)) throw std::invalid_argument("give both --a and --b or neither");
        ds = std::isnan(gd_a) ? gen_random_curve(gd_n, gd_seed) : gen_curve(gd_a, gd_b, gd_n);
      } else if (gd_kind == "spheres") {
        ds = gen_concentric_spheres(gd_d, gd_n, gd_seed);
      } else {
        ds = gen_known_topology(topology_kind_from_string(gd_kind), gd_n, gd_noise, gd_seed, gd_complement);
      }
      auto out = detail::open_out(output_path(gd_out).string());
      c.config("gen-data").write(out);
      write_dataset(out, ds);
      return kOk;
    });
  }

  void build_train() {
    auto& c = command(app, "train", "train a network on a dataset file");
    c.add("data", tr_data, "dataset CSV")->required();
    c.add("preset", tr_preset, "curves | spheres | propagation (defaults for unset flags)");
    c.add("arch", tr_arch, "layer sizes, e.g. 2,50,50,50,2");
    c.add("loss", tr_loss, "mse | ce");
    c.add("lr", tr_lr, "learning rate");
    c.add("epochs", tr_epochs, "epochs");
    c.add("stop-loss", tr_stop_loss, "stop when loss falls below this (0 = off)");
    c.add("stop-accuracy", tr_stop_accuracy, "stop when accuracy exceeds this (0 = off)");
    c.add("optimizer", tr_optimizer, "adam | gd");
    c.add("init", tr_init, "kaiming | orthogonal");
    c.add("seed", tr_seed, "initialisation seed");
    c.app()->add_option("--out", tr_out, "weight file; loss history goes to <out>.loss.csv")
        ->capture_default_str();
    action_for(c, [this, &c] {
      const auto ds = load_dataset(tr_data);
      apply_train_preset(c, ds);
      if (tr_arch.empty()) throw std::invalid_argument("train: --arch or --preset is required");
      const auto shape = parse_arch(tr_arch);
      TrainConfig tc;
      if (tr_loss == "mse") {
        tc.loss = Loss::MeanSquaredError;
      } else if (tr_loss == "ce") {
        tc.loss = Loss::CrossEntropy;
      } else {
        throw std::invalid_argument("--loss must be mse or ce");
      }
      if (tr_optimizer == "adam") {
        tc.optimizer = Optimizer::Adam;
      } else if (tr_optimizer == "gd") {
        tc.optimizer = Optimizer::GradientDescent;
      } else {
        throw std::invalid_argument("--optimizer must be adam or gd");
      }
      tc.learning_rate = tr_lr;
      tc.epochs = tr_epochs;
      tc.seed = tr_seed;
      if (tr_stop_loss > 0.0) tc.stop = StopCriterion{StopCriterion::Kind::LossBelow, tr_stop_loss};
      if (tr_stop_accuracy > 0.0) tc.stop = StopCriterion{StopCriterion::Kind::AccuracyAbove, tr_stop_accuracy};
      const auto result = train(init_network(tr_init, shape, tr_seed), ds.inputs, ds.targets, tc);

      const auto cfg = c.config("train");
      WeightFile wf{result.network, {}};
      wf.meta.emplace_back("command", cfg.command);
      for (const auto& [k, v] : cfg.values) wf.meta.emplace_back("config." + k, v);
      wf.meta.emplace_back("final_loss", format_double(result.final_loss));
      const auto path = output_path(tr_out);
      save_weights(path.string(), wf);
      auto hist = detail::open_out(path.string() + ".loss.csv");
      cfg.write(hist);
      hist << "epoch,loss\n";
      for (std::size_t e = 0; e < result.loss_history.size(); ++e)
        hist << e << ',' << format_double(result.loss_history[e]) << '\n';
      hist << "# final_loss " << format_double(result.final_loss) << '\n';
      if (tc.loss == Loss::CrossEntropy) hist << "# final_accuracy " << format_double(result.final_accuracy) << '\n';
      return kOk;
    });
  }

  void apply_train_preset(const Command& c, const LabeledDataset& ds) {
    if (tr_preset.empty()) return;
    auto set = [&](const std::string& name, auto& var, auto value) {
      if (!c.given(name)) var = value;
    };
    const auto in = std::to_string(ds.inputs.cols());
    if (tr_preset == "curves") {
      set("arch", tr_arch, in + ",50,50,50,2");
      set("loss", tr_loss, std::string("mse"));
      set("lr", tr_lr, 1e-4);
      set("epochs", tr_epochs, std::size_t{1000});
      set("stop-loss", tr_stop_loss, 2e-5);
    } else if (tr_preset == "spheres") {
      set("arch", tr_arch, in + ",25,25,25,25,2");
      set("loss", tr_loss, std::string("ce"));
      set("lr", tr_lr, 2e-5);
      set("epochs", tr_epochs, std::size_t{1000});
    } else if (tr_preset == "propagation") {
      std::string arch = in;
      for (int k = 0; k < 9; ++k) arch += ",15";
      set("arch", tr_arch, arch + ",2");
      set("loss", tr_loss, std::string("ce"));
      set("lr", tr_lr, 2e-5);
      set("epochs", tr_epochs, std::size_t{5000});
      set("stop-accuracy", tr_stop_accuracy, 0.999);
    } else {
      throw std::invalid_argument("unknown --preset '" + tr_preset + "'");
    }
  }

  void build_decompose() {
    auto& c = command(app, "decompose", "populated polyhedral decomposition report");
    c.add("weights", dc_weights, "weight file")->required();
    c.add("data", dc_data, "dataset CSV")->required();
    c.add("layer", dc_layer, "layer (0 = last)");
    c.add("bbox", dc_bbox, "bounding box half-width");
    c.add("rank-tol", dc_rank_tol, "relative singular-value cutoff for ranks");
    c.add("label", dc_label, "use only points with this class label (-1 = all)");
    c.app()->add_option("--out", dc_out, "report CSV")->capture_default_str();
    action_for(c, [this, &c] {
      const auto wf = load_weights(dc_weights);
      const Matrix x = select_label(load_dataset(dc_data), dc_label);
      const std::size_t layer = resolve_layer(dc_layer, wf.network);
      const auto decomp = populate_decomposition(wf.network, x, layer, BoundingBox::symmetric(x.cols(), dc_bbox));
      const auto ranks = rank_profile(wf.network, decomp, dc_rank_tol);
      std::map<std::size_t, std::size_t> occupancy;
      for (auto k : points_per_region_histogram(decomp)) ++occupancy[k];
      auto out = detail::open_out(output_path(dc_out).string());
      c.config("decompose").write(out);
      out << "# regions " << decomp.size() << '\n';
      for (const auto& [k, count] : occupancy) out << "# occupancy " << k << ' ' << count << '\n';
      for (const auto& [r, count] : ranks.histogram) out << "# rank " << r << ' ' << count << '\n';
      out << "region,points,rank,codeword\n";
      for (std::size_t r = 0; r < decomp.size(); ++r)
        out << r << ',' << decomp.regions[r].points.size() << ',' << ranks.ranks[r].second << ','
            << decomp.regions[r].codeword.to_string() << '\n';
      return kOk;
    });
  }

  void build_overlap() {
    auto& c = command(app, "overlap", "overlap decomposition as a partition file");
    c.add("weights", ov_weights, "weight file")->required();
    c.add("data", ov_data, "dataset CSV")->required();
    c.add("preset", ov_preset, "curves | spheres (delta 1) or propagation (delta 10)");
    c.add("layer", ov_layer, "layer (0 = last)");
    c.add("delta", ov_delta, "output-space prefilter radius");
    c.add("bbox", ov_bbox, "bounding box half-width");
    c.add("tol", ov_tol, "LP feasibility tolerance");
    c.add("label", ov_label, "use only points with this class label (-1 = all)");
    c.app()->add_option("--out", ov_out, "partition CSV")->capture_default_str();
    action_for(c, [this, &c] {
      if (!ov_preset.empty() && !c.given("delta")) {
        if (ov_preset == "propagation") {
          ov_delta = 10.0;
        } else if (ov_preset != "curves" && ov_preset != "spheres") {
          throw std::invalid_argument("unknown --preset '" + ov_preset + "'");
        }
      }
      const auto wf = load_weights(ov_weights);
      const Matrix x = select_label(load_dataset(ov_data), ov_label);
      const std::size_t layer = resolve_layer(ov_layer, wf.network);
      const auto od = overlap_decomposition(wf.network, layer, x, BoundingBox::symmetric(x.cols(), ov_bbox),
                                            {ov_delta, ov_tol, jobs});
      auto out = detail::open_out(output_path(ov_out).string());
      write_partition(out, od, c.config("overlap"));
      return kOk;
    });
  }

  void build_homology() {
    auto& c = command(app, "homology", "barcode of a dataset: Euclidean, k-NN geodesic or quotient");
    c.add("data", hm_data, "dataset CSV")->required();
    c.add("partition", hm_partition, "partition file: quotient homology");
    c.add("knn", hm_knn, "k-NN geodesic metric with this k (0 = off)");
    c.add("weights", hm_weights, "push points through this network first");
    c.add("layer", hm_layer, "representation layer when --weights is given (0 = last)");
    c.add("label", hm_label, "use only points with this class label (-1 = all)");
    c.add("max-dim", hm_max_dim, "highest homology dimension");
    c.add_optional("max-scale", hm_max_scale, "filtration cutoff (default: epsilon)");
    c.add_optional("epsilon", hm_epsilon, "scale at which Betti numbers are reported");
    c.add("simplex-cap", hm_cap, "abort above this many simplices");
    c.app()->add_option("--out", hm_out, "barcode CSV")->capture_default_str();
    action_for(c, [this, &c] {
      if (std::isnan(hm_max_scale) && std::isnan(hm_epsilon)) {
        throw std::invalid_argument("homology: give --max-scale or --epsilon");
      }
      if (!hm_partition.empty() && hm_knn > 0) {
        throw std::invalid_argument("homology: --partition and --knn are mutually exclusive");
      }
      const double scale = std::isnan(hm_max_scale) ? hm_epsilon : hm_max_scale;
      Matrix x = select_label(load_dataset(hm_data), hm_label);
      if (!hm_partition.empty() && !hm_weights.empty()) {
        throw std::invalid_argument("homology: quotient homology is computed in input space; drop --weights");
      }
      if (!hm_weights.empty()) {
        const auto wf = load_weights(hm_weights);
        x = layer_outputs(wf.network, x, resolve_layer(hm_layer, wf.network));
      }
      Barcode bc;
      if (!hm_partition.empty()) {
        bc = quotient_homology(x, load_partition(hm_partition), hm_max_dim, scale, hm_cap, jobs);
      } else if (hm_knn > 0) {
        bc = rips_persistence(knn_geodesic_metric(x, hm_knn), hm_max_dim, scale, hm_cap);
      } else {
        bc = rips_persistence(pairwise_distances(x), hm_max_dim, scale, hm_cap);
      }
      auto out = detail::open_out(output_path(hm_out).string());
      write_barcode(out, bc, c.config("homology"));
      if (!std::isnan(hm_epsilon)) {
        out << "# betti_at " << format_double(hm_epsilon);
        for (auto b : betti_at_scale(bc, hm_epsilon)) out << ' ' << b;
        out << '\n';
      }
      return kOk;
    });
  }

  void add_experiment_common(Command& c) {
    c.add("seeds", ex_seeds, "number of seeds");
    c.add("first-seed", ex_first_seed, "first seed");
    c.app()->add_option("--out", ex_out, "bundle directory")->capture_default_str();
  }

  std::vector<std::uint64_t> seed_list() const {
    std::vector<std::uint64_t> s(ex_seeds);
    for (std::size_t i = 0; i < ex_seeds; ++i) s[i] = ex_first_seed + i;
    return s;
  }

  int finish_bundle(ResultBundle& bundle) {
    bundle.finish();
    for (const auto& f : bundle.failures()) std::cerr << "ovh: " << f << '\n';
    if (bundle.ok()) return kOk;
    return bundle.capped() ? kResourceCap : kNumeric;
  }

  void build_experiments() {
    auto* exp = app.add_subcommand("experiment", "end-to-end experiment pipelines writing a result bundle");
    exp->require_subcommand(1);

    auto& cu = command(*exp, "curves", "trained curve fits: persistent vs quotient barcodes");
    add_experiment_common(cu);
    cu.add("n", curves.n, "samples");
    cu.add_optional("a", curves_a, "fixed curve parameter a");
    cu.add_optional("b", curves_b, "fixed curve parameter b");
    cu.add("width", curves.width, "hidden width");
    cu.add("hidden", curves.hidden, "hidden layers");
    cu.add("lr", curves.learning_rate, "learning rate");
    cu.add("epochs", curves.epochs, "epochs");
    cu.add("stop-loss", curves.stop_mse, "stop when MSE falls below this");
    cu.add("delta", curves.delta, "overlap prefilter radius");
    cu.add("bbox", curves.box, "bounding box half-width");
    cu.add("epsilon", curves.epsilon, "homology scale");
    cu.add("max-dim", curves.max_dim, "highest homology dimension");
    cu.add("simplex-cap", curves.simplex_cap, "abort a barcode above this many simplices");
    action_for(cu, [this, &cu] {
      if (std::isnan(curves_a) != std::isnan(curves_b)) throw std::invalid_argument("give both --a and --b or neither");
      if (!std::isnan(curves_a)) {
        curves.a = curves_a;
        curves.b = curves_b;
      }
      curves.jobs = jobs;
      ResultBundle bundle(output_path(ex_out), cu.config("experiment curves"));
      write_curves_bundle(bundle, curves, seed_list());
      return finish_bundle(bundle);
    });

    auto& sp = command(*exp, "spheres", "overlap statistics before and after training");
    add_experiment_common(sp);
    sp.add("d", spheres.d, "sphere dimension");
    sp.add("n-per-sphere", spheres.n_per_sphere, "points per sphere");
    sp.add("data-seed", spheres.data_seed, "dataset seed");
    sp.add("width", spheres.width, "hidden width");
    sp.add("hidden", spheres.hidden, "hidden layers");
    sp.add("init", spheres.init, "kaiming | orthogonal");
    sp.add("lr", spheres.learning_rate, "learning rate");
    sp.add("epochs", spheres.epochs, "epochs");
    sp.add("delta", spheres.delta, "overlap prefilter radius");
    sp.add("bbox", spheres.box, "bounding box half-width");
    sp.add("volume-samples", spheres.volume_samples, "Monte-Carlo samples per region volume");
    action_for(sp, [this, &sp] {
      spheres.jobs = jobs;
      ResultBundle bundle(output_path(ex_out), sp.config("experiment spheres"));
      write_spheres_bundle(bundle, spheres, seed_list());
      return finish_bundle(bundle);
    });

    auto& pr = command(*exp, "propagation", "per-layer Betti numbers, quotient vs k-NN persistent");
    add_experiment_common(pr);
    pr.add("kind", prop_kind, "circle | annulus-cloud | wedge-of-circles | interval");
    pr.add("n", prop.n, "manifold points");
    pr.add("noise", prop.noise, "Gaussian noise");
    pr.add("data-seed", prop.data_seed, "dataset seed");
    pr.add("width", prop.width, "hidden width");
    pr.add("hidden", prop.hidden, "hidden layers");
    pr.add("lr", prop.learning_rate, "learning rate");
    pr.add("epochs", prop.epochs, "epochs");
    pr.add("stop-accuracy", prop.stop_accuracy, "stop when accuracy exceeds this");
    pr.add("delta", prop.delta, "overlap prefilter radius");
    pr.add("bbox", prop.box, "bounding box half-width");
    pr.add("knn", prop.knn, "k of the k-NN graph");
    pr.add("epsilon-persistent", prop.epsilon_persistent, "scale for k-NN geodesic Betti numbers");
    pr.add("epsilon-quotient", prop.epsilon_quotient, "scale for quotient Betti numbers");
    pr.add("max-dim", prop.max_dim, "highest homology dimension");
    pr.add("exclude-misclassified", prop.exclude_misclassified, "drop misclassified points first");
    action_for(pr, [this, &pr] {
      prop.kind = topology_kind_from_string(prop_kind);
      prop.jobs = jobs;
      ResultBundle bundle(output_path(ex_out), pr.config("experiment propagation"));
      write_propagation_bundle(bundle, prop, seed_list());
      return finish_bundle(bundle);
    });

    auto& sw = command(*exp, "expressivity-sweep", "populated and overlap counts over widths x depths");
    add_experiment_common(sw);
    sw.add("widths", sweep.widths, "hidden widths")->delimiter(',');
    sw.add("depths", sweep.depths, "hidden layer counts")->delimiter(',');
    sw.add("d", sweep.d, "sphere dimension");
    sw.add("n-per-sphere", sweep.n_per_sphere, "points per sphere");
    sw.add("data-seed", sweep.data_seed, "dataset seed");
    sw.add("init", sweep.init, "kaiming | orthogonal");
    sw.add("delta", sweep.delta, "overlap prefilter radius");
    sw.add("bbox", sweep.box, "bounding box half-width");
    action_for(sw, [this, &sw] {
      sweep.jobs = jobs;
      ResultBundle bundle(output_path(ex_out), sw.config("experiment expressivity-sweep"));
      write_sweep_bundle(bundle, sweep, seed_list());
      return finish_bundle(bundle);
    });
  }

  void build_replay() {
    auto* rp = app.add_subcommand("replay", "re-run the command recorded in a result file");
    rp->add_option("result", rp_file, "result file (or bundle manifest.txt)")->required();
    rp->add_option("--out", rp_out, "where the re-run writes its output")->required();
    rp->add_option("--jobs", jobs, "worker threads")->capture_default_str();
    rp->callback([this] { action = [this] { return replay(); }; });
  }

  int replay();

  void action_for(Command& c, std::function<int()> fn) {
    c.app()->callback([this, fn = std::move(fn)] { action = fn; });
  }
};

int run(std::vector<std::string> args);

int Cli::replay() {
  const auto cfg = read_run_config(rp_file);
  auto args = cfg.to_args();
  args.push_back("--out=" + rp_out);
  args.push_back("--jobs=" + std::to_string(jobs));
  return run(std::move(args));
}

int run(std::vector<std::string> args) {
  Cli cli;
  std::reverse(args.begin(), args.end());
  try {
    cli.app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = cli.app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  try {
    return cli.action ? cli.action() : kUsage;
  } catch (const ResourceCapError& e) {
    std::cerr << "ovh: resource cap: " << e.what() << '\n';
    return kResourceCap;
  } catch (const NumericError& e) {
    std::cerr << "ovh: numeric failure: " << e.what() << '\n';
    return kNumeric;
  } catch (const IoError& e) {
    std::cerr << "ovh: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "ovh: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "ovh: " << e.what() << '\n';
    return kNumeric;
  }
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(std::move(args));
}
