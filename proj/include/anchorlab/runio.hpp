#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "anchorlab/graph.hpp"
#include "anchorlab/tasks.hpp"

namespace anchorlab {

/// Shortest round-trippable decimal form of a double; used everywhere a
/// number lands in a results file so reruns are byte-comparable.
inline std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return std::string(buf);
}

/// "caveman:CxS", "grid:RxC", or "file:PATH". Dataset strings land in CSV
/// fields, so they must stay comma-free (file paths included).
struct DatasetSpec {
  enum class Kind { caveman, grid, file };
  Kind kind = Kind::caveman;
  int a = 0, b = 0;
  std::string path;

  static DatasetSpec parse(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("dataset '" + text + "': expected kind:args");
    }
    const std::string kind = text.substr(0, colon);
    const std::string args = text.substr(colon + 1);
    DatasetSpec spec;
    if (kind == "file") {
      spec.kind = Kind::file;
      spec.path = args;
      if (spec.path.empty()) throw std::invalid_argument("dataset '" + text + "': empty path");
      if (spec.path.find(',') != std::string::npos) {
        throw std::invalid_argument("dataset '" + text + "': commas not allowed in paths");
      }
      return spec;
    }
    if (kind != "caveman" && kind != "grid") {
      throw std::invalid_argument("dataset '" + text + "': unknown kind '" + kind + "'");
    }
    spec.kind = kind == "caveman" ? Kind::caveman : Kind::grid;
    const auto sep = args.find('x');
    if (sep == std::string::npos) {
      throw std::invalid_argument("dataset '" + text + "': expected AxB sizes");
    }
    try {
      spec.a = std::stoi(args.substr(0, sep));
      spec.b = std::stoi(args.substr(sep + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("dataset '" + text + "': bad sizes");
    }
    return spec;
  }

  std::string to_string() const {
    switch (kind) {
      case Kind::caveman: return "caveman:" + std::to_string(a) + "x" + std::to_string(b);
      case Kind::grid: return "grid:" + std::to_string(a) + "x" + std::to_string(b);
      case Kind::file: return "file:" + path;
    }
    throw std::logic_error("DatasetSpec: bad kind");
  }

  Graph build() const {
    switch (kind) {
      case Kind::caveman: return gen_caveman(a, b);
      case Kind::grid: return gen_grid(a, b);
      case Kind::file: return load_edge_list(path).graph;
    }
    throw std::logic_error("DatasetSpec: bad kind");
  }
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace detail

/// Hash of everything that defines a run except the seed, so one configuration
/// swept over seeds shares a hash and resuming can key on (hash, seed).
inline std::string config_hash(const std::string& dataset, const TrainConfig& cfg) {
  std::ostringstream canon;
  canon << "task=" << to_string(cfg.task) << ";dataset=" << dataset
        << ";strategy=" << to_string(cfg.strategy);
  if (cfg.strategy == Strategy::centrality_anchors) {
    canon << ";centrality=" << to_string(cfg.centrality_kind);
  }
  canon << ";alpha=" << fmt_double(cfg.alpha) << ";k_const=" << fmt_double(cfg.k_const)
        << ";lr=" << fmt_double(cfg.lr) << ";epochs=" << cfg.epochs
        << ";hidden=" << cfg.hidden << ";pos_dim=" << cfg.pos_dim;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(detail::fnv1a(canon.str())));
  return std::string(buf);
}

inline std::string results_csv_header() {
  return "config_hash,task,dataset,strategy,centrality,n,edges,k,alpha,k_const,lr,"
         "epochs,hidden,pos_dim,seed,best_epoch,best_valid_auc,test_auc";
}

inline std::string results_csv_row(const std::string& dataset, const RunRecord& rec) {
  const TrainConfig& cfg = rec.config;
  std::ostringstream row;
  row << config_hash(dataset, cfg) << "," << to_string(cfg.task) << "," << dataset << ","
      << to_string(cfg.strategy) << ","
      << (cfg.strategy == Strategy::centrality_anchors ? to_string(cfg.centrality_kind) : "-")
      << "," << rec.n << "," << rec.edge_count << "," << rec.k << ","
      << fmt_double(cfg.alpha) << "," << fmt_double(cfg.k_const) << ","
      << fmt_double(cfg.lr) << "," << cfg.epochs << "," << cfg.hidden << ","
      << cfg.pos_dim << "," << cfg.seed << "," << rec.best_epoch << ","
      << fmt_double(rec.best_valid_auc) << "," << fmt_double(rec.test_auc);
  return row.str();
}

/// (config_hash, seed) keys already present in a results CSV; tolerant of a
/// missing file so a fresh sweep starts clean.
inline std::set<std::string> completed_run_keys(const std::string& csv_path) {
  std::set<std::string> done;
  std::ifstream in(csv_path);
  if (!in) return done;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() < 15) continue;
    done.insert(cells[0] + ":" + cells[14]);
  }
  return done;
}

/// Epoch-level curve and config echo, one JSON file per run.
inline void write_run_sidecar(const std::string& path, const std::string& dataset,
                              const RunRecord& rec) {
  nlohmann::json j;
  const TrainConfig& cfg = rec.config;
  j["config_hash"] = config_hash(dataset, cfg);
  j["task"] = to_string(cfg.task);
  j["dataset"] = dataset;
  j["strategy"] = to_string(cfg.strategy);
  if (cfg.strategy == Strategy::centrality_anchors) {
    j["centrality"] = to_string(cfg.centrality_kind);
  }
  j["alpha"] = cfg.alpha;
  j["k_const"] = cfg.k_const;
  j["lr"] = cfg.lr;
  j["epochs"] = cfg.epochs;
  j["hidden"] = cfg.hidden;
  j["pos_dim"] = cfg.pos_dim;
  j["seed"] = cfg.seed;
  j["n"] = rec.n;
  j["edges"] = rec.edge_count;
  j["k"] = rec.k;
  j["best_epoch"] = rec.best_epoch;
  j["best_valid_auc"] = rec.best_valid_auc;
  j["test_auc"] = rec.test_auc;
  j["selector_degenerate"] = rec.selector_degenerate;
  auto& curve = j["curve"] = nlohmann::json::array();
  for (const EpochStat& s : rec.curve) {
    curve.push_back({{"epoch", s.epoch}, {"loss", s.loss}, {"valid_auc", s.valid_auc}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_run_sidecar: cannot open " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write_run_sidecar: write failed on " + path);
}

/// Long-form per-epoch anchor log: epoch, anchor id, and (for learned
/// strategies) the anchor's normalized selection score.
inline void write_anchor_trace(const std::string& path, const RunRecord& rec) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_anchor_trace: cannot open " + path);
  out << "epoch,anchor,likelihood\n";
  for (const EpochStat& s : rec.curve) {
    for (std::size_t i = 0; i < s.anchors.size(); ++i) {
      out << s.epoch << "," << s.anchors[i] << ","
          << (i < s.likelihood.size() ? fmt_double(s.likelihood[i]) : "nan") << "\n";
    }
  }
  if (!out) throw std::runtime_error("write_anchor_trace: write failed on " + path);
}

/// Fraction of the trailing `window` epochs in which each node was an anchor.
inline std::vector<double> selection_frequency(const RunRecord& rec, int window) {
  if (window < 1) throw std::invalid_argument("selection_frequency: window must be >= 1");
  std::vector<double> freq(static_cast<std::size_t>(rec.n), 0.0);
  const int total = static_cast<int>(rec.curve.size());
  const int from = std::max(0, total - window);
  const int used = total - from;
  if (used == 0) throw std::invalid_argument("selection_frequency: empty training curve");
  for (int e = from; e < total; ++e) {
    for (int a : rec.curve[e].anchors) freq[a] += 1.0;
  }
  for (double& f : freq) f /= used;
  return freq;
}

}  // namespace anchorlab
