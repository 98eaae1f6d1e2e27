#pragma once

#include "ovh/datasets.hpp"
#include "ovh/homology.hpp"
#include "ovh/network.hpp"
#include "ovh/overlap.hpp"

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace ovh {

inline constexpr int kSchemaVersion = 1;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 17 significant digits, "inf"/"-inf" for infinities.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw IoError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw IoError("not a number: '" + s + "'");
  return v;
}

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

inline std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Run configuration echo

/// Command name plus its resolved parameters, written at the top of every
/// result file so the run can be replayed.
struct RunConfig {
  std::string command;
  std::map<std::string, std::string> values;

  void set(const std::string& key, const std::string& v) { values[key] = v; }
  void set(const std::string& key, double v) { values[key] = format_double(v); }
  void set(const std::string& key, std::size_t v) { values[key] = std::to_string(v); }
  void set(const std::string& key, bool v) { values[key] = v ? "true" : "false"; }

  void write(std::ostream& os) const {
    os << "# ovh-result " << command << " schema " << kSchemaVersion << '\n';
    for (const auto& [k, v] : values) os << "# config " << k << '=' << v << '\n';
  }

  /// Argument list reproducing this run (without --out). Empty values are left
  /// out; every string option defaults to empty.
  std::vector<std::string> to_args() const {
    std::vector<std::string> args;
    std::string cmd = command;
    std::istringstream cs(cmd);
    for (std::string w; cs >> w;) args.push_back(w);
    for (const auto& [k, v] : values)
      if (!v.empty()) args.push_back("--" + k + "=" + v);
    return args;
  }
};

/// Reads the config echo of a result file. Weight files carry it as
/// `meta command ...` and `meta config.<key> ...` lines.
inline RunConfig read_run_config(const std::string& path) {
  auto in = detail::open_in(path);
  RunConfig cfg;
  std::string line;
  bool header = false;
  if (in.peek() == 'o') {
    std::getline(in, line);
    if (line.rfind("ovh-weights", 0) != 0) throw IoError(path + ": no result header");
    while (std::getline(in, line)) {
      if (line.rfind("meta command ", 0) == 0) {
        cfg.command = line.substr(13);
        header = true;
      } else if (line.rfind("meta config.", 0) == 0) {
        const auto kv = line.substr(12);
        const auto sp = kv.find(' ');
        if (sp == std::string::npos) throw IoError(path + ": malformed config line");
        cfg.values[kv.substr(0, sp)] = kv.substr(sp + 1);
      }
    }
    if (!header) throw IoError(path + ": weight file has no command record");
    return cfg;
  }
  while (std::getline(in, line)) {
    if (line.rfind("# ovh-result ", 0) == 0) {
      const auto rest = line.substr(13);
      const auto pos = rest.rfind(" schema ");
      if (pos == std::string::npos) throw IoError(path + ": malformed result header");
      cfg.command = rest.substr(0, pos);
      header = true;
    } else if (line.rfind("# config ", 0) == 0) {
      const auto kv = line.substr(9);
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw IoError(path + ": malformed config line");
      cfg.values[kv.substr(0, eq)] = kv.substr(eq + 1);
    } else if (!line.empty() && line[0] != '#') {
      break;
    }
  }
  if (!header) throw IoError(path + ": no result header");
  return cfg;
}

// ---------------------------------------------------------------------------
// Weight files
//
//   ovh-weights 1
//   meta <key> <value>
//   shape n0 n1 ... nL
//   layer k
//   w <row of n_{k-1} values>      (n_k lines)
//   b <n_k values>

struct WeightFile {
  MLPNetwork network;
  std::vector<std::pair<std::string, std::string>> meta;  // in file order
};

inline void write_weights(std::ostream& os, const WeightFile& wf) {
  os << "ovh-weights " << kSchemaVersion << '\n';
  for (const auto& [k, v] : wf.meta) os << "meta " << k << ' ' << v << '\n';
  os << "shape";
  for (auto s : wf.network.shape()) os << ' ' << s;
  os << '\n';
  for (std::size_t k = 1; k <= wf.network.depth(); ++k) {
    const auto& l = wf.network.at(k);
    os << "layer " << k << '\n';
    for (Eigen::Index i = 0; i < l.linear().rows(); ++i) {
      os << 'w';
      for (Eigen::Index j = 0; j < l.linear().cols(); ++j) os << ' ' << format_double(l.linear()(i, j));
      os << '\n';
    }
    os << 'b';
    for (Eigen::Index i = 0; i < l.offset().size(); ++i) os << ' ' << format_double(l.offset()(i));
    os << '\n';
  }
}

inline void save_weights(const std::string& path, const WeightFile& wf) {
  auto out = detail::open_out(path);
  write_weights(out, wf);
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline WeightFile read_weights(std::istream& in, const std::string& name = "<stream>") {
  std::string line;
  auto fail = [&](const std::string& why) -> IoError { return IoError(name + ": " + why); };
  if (!std::getline(in, line)) throw fail("empty weight file");
  {
    const auto w = detail::words(line);
    if (w.size() != 2 || w[0] != "ovh-weights") throw fail("missing 'ovh-weights' header");
    if (w[1] != std::to_string(kSchemaVersion)) throw fail("unsupported schema " + w[1]);
  }
  WeightFile wf;
  std::vector<std::size_t> shape;
  std::vector<AffineMap> layers;
  Matrix w;
  Eigen::Index row = 0;
  std::size_t current = 0;
  auto finish_layer = [&](const Vector& b) {
    if (row != w.rows()) throw fail("layer " + std::to_string(current) + " has too few weight rows");
    layers.emplace_back(w, b);
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    const std::string tag = line.substr(0, sp);
    const std::string rest = sp == std::string::npos ? "" : line.substr(sp + 1);
    if (tag == "meta") {
      const auto sp2 = rest.find(' ');
      if (sp2 == std::string::npos) throw fail("meta line needs a key and a value");
      wf.meta.emplace_back(rest.substr(0, sp2), rest.substr(sp2 + 1));
    } else if (tag == "shape") {
      for (const auto& s : detail::words(rest)) shape.push_back(static_cast<std::size_t>(std::stoul(s)));
      if (shape.size() < 2) throw fail("shape needs at least two sizes");
    } else if (tag == "layer") {
      current = static_cast<std::size_t>(std::stoul(rest));
      if (current != layers.size() + 1 || current >= shape.size()) throw fail("unexpected layer " + rest);
      w.resize(static_cast<Eigen::Index>(shape[current]), static_cast<Eigen::Index>(shape[current - 1]));
      row = 0;
    } else if (tag == "w") {
      const auto vals = detail::words(rest);
      if (current == 0 || row >= w.rows() || static_cast<Eigen::Index>(vals.size()) != w.cols()) {
        throw fail("weight row does not match shape");
      }
      for (std::size_t j = 0; j < vals.size(); ++j) w(row, static_cast<Eigen::Index>(j)) = parse_double(vals[j]);
      ++row;
    } else if (tag == "b") {
      const auto vals = detail::words(rest);
      if (current == 0 || static_cast<Eigen::Index>(vals.size()) != w.rows()) throw fail("bias does not match shape");
      Vector b(w.rows());
      for (std::size_t j = 0; j < vals.size(); ++j) b(static_cast<Eigen::Index>(j)) = parse_double(vals[j]);
      finish_layer(b);
    } else {
      throw fail("unknown line tag '" + tag + "'");
    }
  }
  if (shape.empty() || layers.size() + 1 != shape.size()) throw fail("incomplete weight file");
  wf.network = MLPNetwork(std::move(layers));
  return wf;
}

inline WeightFile load_weights(const std::string& path) {
  auto in = detail::open_in(path);
  return read_weights(in, path);
}

// ---------------------------------------------------------------------------
// Dataset CSV
//
//   # generator <name>
//   # seed <n>
//   # param <key> <value>
//   # betti <b0> <b1> ...
//   x0,...,x{d-1},y0,...      (classification: x0,...,label)

inline void write_dataset(std::ostream& os, const LabeledDataset& ds) {
  const auto& m = ds.metadata;
  if (!m.generator.empty()) os << "# generator " << m.generator << '\n';
  os << "# seed " << m.seed << '\n';
  for (const auto& [k, v] : m.parameters) os << "# param " << k << ' ' << format_double(v) << '\n';
  if (!m.betti.empty()) {
    os << "# betti";
    for (auto b : m.betti) os << ' ' << b;
    os << '\n';
  }
  for (Eigen::Index j = 0; j < ds.inputs.cols(); ++j) os << (j ? "," : "") << 'x' << j;
  if (ds.classification) {
    os << ",label";
  } else {
    for (Eigen::Index j = 0; j < ds.targets.cols(); ++j) os << ",y" << j;
  }
  os << '\n';
  for (Eigen::Index i = 0; i < ds.inputs.rows(); ++i) {
    for (Eigen::Index j = 0; j < ds.inputs.cols(); ++j) os << (j ? "," : "") << format_double(ds.inputs(i, j));
    for (Eigen::Index j = 0; j < ds.targets.cols(); ++j) {
      os << ',';
      if (ds.classification) {
        os << std::lround(ds.targets(i, j));
      } else {
        os << format_double(ds.targets(i, j));
      }
    }
    os << '\n';
  }
}

inline void save_dataset(const std::string& path, const LabeledDataset& ds) {
  auto out = detail::open_out(path);
  write_dataset(out, ds);
  if (!out) throw IoError("write failed for '" + path + "'");
}

inline LabeledDataset read_dataset(std::istream& in, const std::string& name = "<stream>") {
  LabeledDataset ds;
  std::string line;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto w = detail::words(line.substr(1));
      if (w.empty()) continue;
      if (w[0] == "generator" && w.size() > 1) ds.metadata.generator = w[1];
      if (w[0] == "seed" && w.size() > 1) ds.metadata.seed = std::stoull(w[1]);
      if (w[0] == "param" && w.size() > 2) ds.metadata.parameters[w[1]] = parse_double(w[2]);
      if (w[0] == "betti") {
        for (std::size_t k = 1; k < w.size(); ++k) ds.metadata.betti.push_back(std::stoul(w[k]));
      }
      continue;
    }
    if (header.empty()) {
      header = detail::split(line, ',');
      continue;
    }
    const auto cells = detail::split(line, ',');
    if (cells.size() != header.size()) {
      throw IoError(name + ": row " + std::to_string(rows.size() + 1) + " has " +
                    std::to_string(cells.size()) + " cells, header has " + std::to_string(header.size()));
    }
    std::vector<double> r;
    for (const auto& c : cells) r.push_back(parse_double(c));
    rows.push_back(std::move(r));
  }
  if (header.empty()) throw IoError(name + ": missing header row");
  Eigen::Index nx = 0;
  while (nx < static_cast<Eigen::Index>(header.size()) && header[static_cast<std::size_t>(nx)] == "x" + std::to_string(nx)) ++nx;
  if (nx == 0) throw IoError(name + ": no x0.. input columns");
  const auto ny = static_cast<Eigen::Index>(header.size()) - nx;
  ds.classification = ny == 1 && header.back() == "label";
  const auto n = static_cast<Eigen::Index>(rows.size());
  ds.inputs.resize(n, nx);
  ds.targets.resize(n, ny);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < nx; ++j) ds.inputs(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    for (Eigen::Index j = 0; j < ny; ++j) ds.targets(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(nx + j)];
  }
  detail::require_finite(ds.inputs, "dataset inputs");
  return ds;
}

inline LabeledDataset load_dataset(const std::string& path) {
  auto in = detail::open_in(path);
  return read_dataset(in, path);
}

// ---------------------------------------------------------------------------
// Barcode file: config echo, then dim,birth,death rows.

inline void write_barcode(std::ostream& os, const Barcode& b, const RunConfig& cfg) {
  cfg.write(os);
  os << "# max_dim " << b.max_dim << '\n';
  os << "dim,birth,death\n";
  for (const auto& bar : b.bars) {
    os << bar.dim << ',' << format_double(bar.birth) << ',' << format_double(bar.death) << '\n';
  }
}

inline Barcode read_barcode(std::istream& in) {
  Barcode b;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto w = detail::words(line.substr(1));
      if (w.size() == 2 && w[0] == "max_dim") b.max_dim = std::stoul(w[1]);
      continue;
    }
    if (!header) {
      header = true;
      continue;
    }
    const auto c = detail::split(line, ',');
    if (c.size() != 3) throw IoError("barcode row needs dim,birth,death");
    b.bars.push_back({std::stoul(c[0]), parse_double(c[1]), parse_double(c[2])});
  }
  return b;
}

// ---------------------------------------------------------------------------
// Partition file: config echo, then class,point rows (class = position in the
// sorted class list).

inline void write_partition(std::ostream& os, const OverlapDecomposition& od, const RunConfig& cfg) {
  cfg.write(os);
  for (std::size_t c = 0; c < od.class_regions.size(); ++c) {
    os << "# regions " << c;
    for (const auto& code : od.class_regions[c]) os << ' ' << code.to_string();
    os << '\n';
  }
  os << "class,point\n";
  for (std::size_t c = 0; c < od.classes.size(); ++c)
    for (auto p : od.classes[c]) os << c << ',' << p << '\n';
}

inline OverlapDecomposition read_partition(std::istream& in, const std::string& name = "<stream>") {
  std::map<std::size_t, std::vector<std::size_t>> classes;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto c = detail::split(line, ',');
    if (c.size() != 2) throw IoError(name + ": partition row needs class,point");
    classes[std::stoul(c[0])].push_back(std::stoul(c[1]));
  }
  OverlapDecomposition od;
  for (auto& [id, members] : classes) {
    std::sort(members.begin(), members.end());
    if (members.size() > 1) od.classes.push_back(std::move(members));
  }
  std::sort(od.classes.begin(), od.classes.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return od;
}

inline OverlapDecomposition load_partition(const std::string& path) {
  auto in = detail::open_in(path);
  return read_partition(in, path);
}

}  // namespace ovh
