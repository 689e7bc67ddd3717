#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "anchorlab/centrality.hpp"
#include "anchorlab/checkpoint.hpp"
#include "anchorlab/graph.hpp"
#include "anchorlab/runio.hpp"
#include "anchorlab/stats.hpp"
#include "anchorlab/tasks.hpp"

namespace {

using nlohmann::json;

/// One trainable unit of work: a dataset plus a fully resolved TrainConfig.
struct JobSpec {
  std::string dataset;
  anchorlab::TrainConfig cfg;
};

[[noreturn]] void config_error(const std::string& path, const std::string& field,
                               const std::string& what) {
  throw std::runtime_error("config " + path + ": field '" + field + "': " + what);
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config " + path + ": cannot open");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw std::runtime_error("config " + path + ": top level must be an object");
  return j;
}

template <typename T>
void apply_field(const json& j, const std::string& path, const std::string& field, T& out) {
  if (!j.contains(field)) return;
  try {
    out = j.at(field).get<T>();
  } catch (const json::exception& e) {
    config_error(path, field, e.what());
  }
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::istringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token.empty()) continue;
    try {
      seeds.push_back(std::stoull(token));
    } catch (const std::exception&) {
      throw std::runtime_error("bad seed '" + token + "' in --seeds");
    }
  }
  if (seeds.empty()) throw std::runtime_error("--seeds produced an empty list");
  return seeds;
}

/// Validate a dataset string early: syntax, and for file: specs, existence.
void validate_dataset(const std::string& spec_text, const std::string& origin) {
  const anchorlab::DatasetSpec spec = anchorlab::DatasetSpec::parse(spec_text);
  if (spec.kind == anchorlab::DatasetSpec::Kind::file &&
      !std::filesystem::exists(spec.path)) {
    throw std::runtime_error(origin + ": dataset file '" + spec.path + "' does not exist");
  }
}

unsigned pool_size(std::size_t job_count) {
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ANCHORLAB_THREADS")) {
    unsigned cap = 0;
    try {
      cap = static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      throw std::runtime_error("ANCHORLAB_THREADS='" + std::string(env) + "' is not a number");
    }
    if (cap == 0) throw std::runtime_error("ANCHORLAB_THREADS must be >= 1");
    threads = std::min(threads, cap);
  }
  if (job_count > 0) threads = std::min<std::size_t>(threads, job_count);
  return std::max(1u, threads);
}

/// Run every pending job, append one CSV row per run (plus sidecar JSON,
/// anchor trace, and checkpoint), skipping (config, seed) pairs already in
/// the results file. Returns the number of failed jobs.
int execute_jobs(const std::vector<JobSpec>& all_jobs, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string results_path = out_dir + "/results.csv";

  const std::set<std::string> done = anchorlab::completed_run_keys(results_path);
  std::vector<JobSpec> jobs;
  for (const JobSpec& job : all_jobs) {
    const std::string key = anchorlab::config_hash(job.dataset, job.cfg) + ":" +
                            std::to_string(job.cfg.seed);
    if (done.count(key) == 0) jobs.push_back(job);
  }
  if (jobs.size() < all_jobs.size()) {
    std::cout << "resume: skipping " << (all_jobs.size() - jobs.size())
              << " completed run(s)\n";
  }
  if (jobs.empty()) {
    std::cout << "nothing to do\n";
    return 0;
  }

  // Datasets repeat across seeds and strategies; build each graph once.
  std::map<std::string, anchorlab::Graph> graphs;
  for (const JobSpec& job : jobs) {
    if (graphs.count(job.dataset) == 0) {
      graphs.emplace(job.dataset, anchorlab::DatasetSpec::parse(job.dataset).build());
    }
  }

  const bool fresh = !fs::exists(results_path) || fs::file_size(results_path) == 0;
  std::ofstream results(results_path, std::ios::app);
  if (!results) throw std::runtime_error("cannot open " + results_path + " for append");
  if (fresh) results << anchorlab::results_csv_header() << "\n" << std::flush;

  std::mutex appender;  // all CSV writes and progress lines go through this
  std::atomic<std::size_t> next{0};
  std::atomic<int> failures{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const JobSpec& job = jobs[i];
      const std::string hash = anchorlab::config_hash(job.dataset, job.cfg);
      const std::string stem =
          out_dir + "/" + hash + "_" + std::to_string(job.cfg.seed);
      try {
        const anchorlab::TrainResult result = anchorlab::train(graphs.at(job.dataset), job.cfg);
        anchorlab::write_run_sidecar(stem + ".json", job.dataset, result.record);
        anchorlab::write_anchor_trace(stem + "_anchors.csv", result.record);
        anchorlab::save_checkpoint(anchorlab::make_run_checkpoint(result), stem + ".ckpt");
        const std::string row = anchorlab::results_csv_row(job.dataset, result.record);
        std::lock_guard<std::mutex> lock(appender);
        results << row << "\n" << std::flush;
        std::cout << "run " << hash << " seed=" << job.cfg.seed << " dataset=" << job.dataset
                  << " strategy=" << anchorlab::to_string(job.cfg.strategy)
                  << " test_auc=" << anchorlab::fmt_double(result.record.test_auc) << "\n";
      } catch (const std::exception& e) {
        failures.fetch_add(1);
        std::lock_guard<std::mutex> lock(appender);
        std::cerr << "run " << hash << " seed=" << job.cfg.seed << " dataset=" << job.dataset
                  << " failed: " << e.what() << "\n";
      }
    }
  };

  const unsigned threads = pool_size(jobs.size());
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return failures.load();
}

/// Shared option state for `run` and `sweep`; config file values first,
/// then command-line flags on top.
struct CommonOptions {
  std::string config_path;
  std::string out_dir = "results";
  std::string task = "link";
  std::string strategy = "learned-e";
  std::string centrality = "degree";
  std::string seeds_text;
  double alpha = 0.5;
  double k_const = 1.0;
  double lr = 1e-3;
  int epochs = 200;
  int hidden = 32;
  int pos_dim = 16;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--config", opt.config_path, "JSON config file (flags override it)");
  cmd->add_option("--out", opt.out_dir, "output directory for results.csv and run artifacts");
  cmd->add_option("--task", opt.task, "task: link or pairs");
  cmd->add_option("--strategy", opt.strategy,
                  "anchor strategy: learned-s, learned-e, random, centrality, none");
  cmd->add_option("--centrality", opt.centrality,
                  "centrality kind for the centrality strategy");
  cmd->add_option("--seeds", opt.seeds_text, "comma-separated seed list, e.g. 0,1,2");
  cmd->add_option("--alpha", opt.alpha, "selection noise scale during training");
  cmd->add_option("--k-const", opt.k_const, "anchor count constant: k = ceil(c * log2 n)");
  cmd->add_option("--lr", opt.lr, "Adam learning rate");
  cmd->add_option("--epochs", opt.epochs, "training epochs");
  cmd->add_option("--hidden", opt.hidden, "hidden width");
  cmd->add_option("--pos-dim", opt.pos_dim, "positional embedding width (e mode)");
}

/// Fold config-file scalars into the option block unless the matching flag
/// was given on the command line.
void merge_config_scalars(const json& j, const std::string& path, const CLI::App* cmd,
                          CommonOptions& opt) {
  auto given = [&](const std::string& flag) { return cmd->count(flag) > 0; };
  if (!given("--out")) apply_field(j, path, "out", opt.out_dir);
  if (!given("--task")) apply_field(j, path, "task", opt.task);
  if (!given("--strategy")) apply_field(j, path, "strategy", opt.strategy);
  if (!given("--centrality")) apply_field(j, path, "centrality", opt.centrality);
  if (!given("--alpha")) apply_field(j, path, "alpha", opt.alpha);
  if (!given("--k-const")) apply_field(j, path, "k_const", opt.k_const);
  if (!given("--lr")) apply_field(j, path, "lr", opt.lr);
  if (!given("--epochs")) apply_field(j, path, "epochs", opt.epochs);
  if (!given("--hidden")) apply_field(j, path, "hidden", opt.hidden);
  if (!given("--pos-dim")) apply_field(j, path, "pos_dim", opt.pos_dim);
}

std::vector<std::uint64_t> resolve_seeds(const json& j, const std::string& path,
                                         const CLI::App* cmd, const CommonOptions& opt) {
  if (cmd->count("--seeds") > 0) return parse_seed_list(opt.seeds_text);
  if (j.contains("seeds")) {
    std::vector<std::uint64_t> seeds;
    apply_field(j, path, "seeds", seeds);
    if (seeds.empty()) config_error(path, "seeds", "must be a nonempty array");
    return seeds;
  }
  if (!opt.seeds_text.empty()) return parse_seed_list(opt.seeds_text);
  throw std::runtime_error("no seeds given: pass --seeds or a 'seeds' array in the config");
}

anchorlab::TrainConfig base_config(const CommonOptions& opt) {
  anchorlab::TrainConfig cfg;
  cfg.task = anchorlab::task_kind_from_string(opt.task);
  cfg.strategy = anchorlab::strategy_from_string(opt.strategy);
  cfg.centrality_kind = anchorlab::centrality_kind_from_string(opt.centrality);
  cfg.alpha = opt.alpha;
  cfg.k_const = opt.k_const;
  cfg.lr = opt.lr;
  cfg.epochs = opt.epochs;
  cfg.hidden = opt.hidden;
  cfg.pos_dim = opt.pos_dim;
  return cfg;
}

int cmd_run(const CLI::App* cmd, CommonOptions& opt, std::string& dataset) {
  json j = json::object();
  std::string path = "<flags>";
  if (!opt.config_path.empty()) {
    path = opt.config_path;
    j = load_config(path);
    merge_config_scalars(j, path, cmd, opt);
    if (cmd->count("--dataset") == 0) apply_field(j, path, "dataset", dataset);
  }
  if (dataset.empty()) throw std::runtime_error("no dataset given: pass --dataset or config");
  validate_dataset(dataset, path);
  const std::vector<std::uint64_t> seeds = resolve_seeds(j, path, cmd, opt);

  std::vector<JobSpec> jobs;
  for (std::uint64_t seed : seeds) {
    JobSpec job{dataset, base_config(opt)};
    job.cfg.seed = seed;
    jobs.push_back(job);
  }
  return execute_jobs(jobs, opt.out_dir) == 0 ? 0 : 1;
}

int cmd_sweep(const CLI::App* cmd, CommonOptions& opt) {
  if (opt.config_path.empty()) throw std::runtime_error("sweep needs --config");
  const std::string& path = opt.config_path;
  const json j = load_config(path);
  merge_config_scalars(j, path, cmd, opt);

  std::vector<std::string> datasets;
  apply_field(j, path, "datasets", datasets);
  if (datasets.empty()) config_error(path, "datasets", "must be a nonempty array");
  for (const std::string& d : datasets) validate_dataset(d, path);

  std::vector<std::string> strategies;
  apply_field(j, path, "strategies", strategies);
  if (strategies.empty()) strategies.push_back(opt.strategy);

  std::vector<std::string> centralities;
  apply_field(j, path, "centralities", centralities);
  if (centralities.empty()) centralities.push_back(opt.centrality);

  const std::vector<std::uint64_t> seeds = resolve_seeds(j, path, cmd, opt);

  std::vector<JobSpec> jobs;
  for (const std::string& dataset : datasets) {
    for (const std::string& strategy : strategies) {
      // The centrality axis only multiplies runs for the centrality strategy.
      const bool uses_kind = strategy == "centrality";
      const std::size_t kinds = uses_kind ? centralities.size() : 1;
      for (std::size_t c = 0; c < kinds; ++c) {
        for (std::uint64_t seed : seeds) {
          CommonOptions o = opt;
          o.strategy = strategy;
          if (uses_kind) o.centrality = centralities[c];
          JobSpec job{dataset, base_config(o)};
          job.cfg.seed = seed;
          jobs.push_back(job);
        }
      }
    }
  }
  std::cout << "sweep: " << jobs.size() << " run(s) over " << datasets.size()
            << " dataset(s), " << strategies.size() << " strateg(ies), " << seeds.size()
            << " seed(s)\n";
  return execute_jobs(jobs, opt.out_dir) == 0 ? 0 : 1;
}

/// A row of results.csv, parsed.
struct ResultRow {
  std::string task, dataset, strategy, centrality, pair_key;
  std::uint64_t seed = 0;
  double test_auc = 0.0;
};

std::vector<ResultRow> read_results(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results file " + path);
  std::vector<ResultRow> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      first = false;
      if (line != anchorlab::results_csv_header()) {
        throw std::runtime_error(path + ": unexpected header row");
      }
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> c;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) c.push_back(cell);
    if (c.size() != 18) {
      throw std::runtime_error(path + ": malformed row '" + line + "'");
    }
    ResultRow row;
    row.task = c[1];
    row.dataset = c[2];
    row.strategy = c[3];
    row.centrality = c[4];
    // Everything defining the run except strategy and centrality. Pairing on
    // this key lines up the same experiment under two strategies.
    row.pair_key = c[1] + "|" + c[2] + "|" + c[8] + "|" + c[9] + "|" + c[10] + "|" + c[11] +
                   "|" + c[12] + "|" + c[13] + "|" + c[14];
    row.seed = std::stoull(c[14]);
    row.test_auc = std::stod(c[17]);
    rows.push_back(row);
  }
  return rows;
}

/// "learned-e" or "centrality:degree" style selector for compare.
struct StrategyMatcher {
  std::string strategy;
  std::string centrality;  // empty matches any

  static StrategyMatcher parse(const std::string& text) {
    StrategyMatcher m;
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
      m.strategy = text;
    } else {
      m.strategy = text.substr(0, colon);
      m.centrality = text.substr(colon + 1);
    }
    anchorlab::strategy_from_string(m.strategy);  // validate
    if (!m.centrality.empty()) anchorlab::centrality_kind_from_string(m.centrality);
    return m;
  }

  bool matches(const ResultRow& row) const {
    if (row.strategy != strategy) return false;
    return centrality.empty() || row.centrality == centrality;
  }
};

int cmd_compare(const std::string& results_path, const std::string& a_text,
                const std::string& b_text, const std::string& dataset_filter,
                const std::string& task_filter) {
  const StrategyMatcher ma = StrategyMatcher::parse(a_text);
  const StrategyMatcher mb = StrategyMatcher::parse(b_text);
  const std::vector<ResultRow> rows = read_results(results_path);

  std::map<std::string, std::pair<std::optional<double>, std::optional<double>>> paired;
  for (const ResultRow& row : rows) {
    if (!dataset_filter.empty() && row.dataset != dataset_filter) continue;
    if (!task_filter.empty() && row.task != task_filter) continue;
    const bool is_a = ma.matches(row);
    const bool is_b = mb.matches(row);
    if (is_a && is_b) {
      throw std::runtime_error("strategies '" + a_text + "' and '" + b_text +
                               "' match the same row; nothing to pair");
    }
    if (!is_a && !is_b) continue;
    auto& slot = paired[row.pair_key];
    std::optional<double>& side = is_a ? slot.first : slot.second;
    if (side.has_value()) {
      throw std::runtime_error("ambiguous pairing: two '" + (is_a ? a_text : b_text) +
                               "' rows share key " + row.pair_key);
    }
    side = row.test_auc;
  }

  std::vector<double> a, b;
  for (const auto& [key, slot] : paired) {
    if (slot.first.has_value() && slot.second.has_value()) {
      a.push_back(*slot.first);
      b.push_back(*slot.second);
    }
  }
  if (a.empty()) {
    throw std::runtime_error("no paired runs between '" + a_text + "' and '" + b_text +
                             "' in " + results_path);
  }

  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= static_cast<double>(a.size());
  mean_b /= static_cast<double>(b.size());

  const anchorlab::WilcoxonResult w = anchorlab::wilcoxon_signed_rank(a, b);
  std::cout << "compare strategy_a=" << a_text << " strategy_b=" << b_text
            << " pairs=" << a.size() << "\n";
  std::cout << "mean_auc_a=" << anchorlab::fmt_double(mean_a)
            << " mean_auc_b=" << anchorlab::fmt_double(mean_b)
            << " mean_gap=" << anchorlab::fmt_double(mean_a - mean_b) << "\n";
  std::cout << "wilcoxon_w_plus=" << anchorlab::fmt_double(w.statistic)
            << " p_value=" << anchorlab::fmt_double(w.p_value)
            << " n_effective=" << w.n_effective << " exact=" << (w.exact ? "true" : "false")
            << " degenerate=" << (w.degenerate ? "true" : "false") << "\n";
  return 0;
}

/// Rebuild enough of a RunRecord from an anchor trace CSV to compute
/// selection frequencies.
anchorlab::RunRecord record_from_trace(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open anchor trace " + path);
  std::string line;
  if (!std::getline(in, line) || line != "epoch,anchor,likelihood") {
    throw std::runtime_error(path + ": not an anchor trace (bad header)");
  }
  std::map<int, anchorlab::EpochStat> epochs;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string e, a, l;
    if (!std::getline(ls, e, ',') || !std::getline(ls, a, ',') || !std::getline(ls, l)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed row");
    }
    int epoch = 0, anchor = 0;
    try {
      epoch = std::stoi(e);
      anchor = std::stoi(a);
    } catch (const std::exception&) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed row");
    }
    if (anchor < 0 || anchor >= n) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": anchor " +
                               std::to_string(anchor) + " outside graph of " +
                               std::to_string(n) + " nodes");
    }
    anchorlab::EpochStat& s = epochs[epoch];
    s.epoch = epoch;
    s.anchors.push_back(anchor);
  }
  if (epochs.empty()) throw std::runtime_error(path + ": no anchor rows");
  anchorlab::RunRecord rec;
  rec.n = n;
  for (auto& [epoch, stat] : epochs) rec.curve.push_back(std::move(stat));
  return rec;
}

int cmd_anchors_analyze(const std::string& trace_path, const std::string& dataset_text,
                        int window) {
  const anchorlab::Graph g = anchorlab::DatasetSpec::parse(dataset_text).build();
  const anchorlab::RunRecord rec = record_from_trace(trace_path, g.n);
  const std::vector<double> freq = anchorlab::selection_frequency(rec, window);
  const int used = std::min<int>(window, static_cast<int>(rec.curve.size()));
  std::cout << "anchors-analyze dataset=" << dataset_text << " window=" << window
            << " epochs_used=" << used << "\n";

  auto fmt_coeff = [](const anchorlab::CorrelationResult& r) {
    return r.degenerate ? std::string("degenerate") : anchorlab::fmt_double(r.value);
  };
  const anchorlab::CentralityKind kinds[] = {
      anchorlab::CentralityKind::degree, anchorlab::CentralityKind::betweenness,
      anchorlab::CentralityKind::closeness, anchorlab::CentralityKind::harmonic,
      anchorlab::CentralityKind::load};
  for (anchorlab::CentralityKind kind : kinds) {
    const anchorlab::ScoreVector sv = anchorlab::centrality(g, kind);
    const anchorlab::CorrelationResult sp = anchorlab::spearman(freq, sv.scores);
    const anchorlab::CorrelationResult kd = anchorlab::kendall(freq, sv.scores);
    std::cout << anchorlab::to_string(kind) << " spearman=" << fmt_coeff(sp)
              << " kendall=" << fmt_coeff(kd) << "\n";
  }
  return 0;
}

int cmd_transfer(const std::vector<std::string>& checkpoints,
                 const std::vector<std::string>& datasets, std::uint64_t seed) {
  for (const std::string& d : datasets) validate_dataset(d, "<flags>");
  std::cout << "checkpoint,dataset,n,k,test_auc\n";
  for (const std::string& ck_path : checkpoints) {
    const anchorlab::Checkpoint ck = anchorlab::load_checkpoint(ck_path);
    for (const std::string& dataset_text : datasets) {
      const anchorlab::Graph g = anchorlab::DatasetSpec::parse(dataset_text).build();
      const anchorlab::RunRecord rec = anchorlab::transfer_eval(ck, g, seed);
      std::cout << ck_path << "," << dataset_text << "," << rec.n << "," << rec.k << ","
                << anchorlab::fmt_double(rec.test_auc) << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anchorlab: anchor-based positional GNN experiments"};
  app.require_subcommand(1);

  CommonOptions run_opt;
  std::string run_dataset;
  CLI::App* run = app.add_subcommand("run", "train one configuration over a seed list");
  add_common_flags(run, run_opt);
  run->add_option("--dataset", run_dataset, "dataset spec: caveman:CxS, grid:RxC, file:PATH");

  CommonOptions sweep_opt;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "cartesian product of datasets x strategies x seeds from a config file");
  add_common_flags(sweep, sweep_opt);

  std::string cmp_results, cmp_a, cmp_b, cmp_dataset, cmp_task;
  CLI::App* compare =
      app.add_subcommand("compare", "paired Wilcoxon between two strategies' test AUCs");
  compare->add_option("--results", cmp_results, "results.csv produced by run/sweep")
      ->required();
  compare->add_option("--strategy-a", cmp_a, "first strategy (e.g. learned-e)")->required();
  compare->add_option("--strategy-b", cmp_b, "second strategy (e.g. random)")->required();
  compare->add_option("--dataset", cmp_dataset, "only pair rows with this dataset");
  compare->add_option("--task", cmp_task, "only pair rows with this task");

  std::string an_trace, an_dataset;
  int an_window = 50;
  CLI::App* analyze = app.add_subcommand(
      "anchors-analyze", "correlate anchor selection frequency with centrality rankings");
  analyze->add_option("--trace", an_trace, "anchor trace CSV from a run")->required();
  analyze->add_option("--dataset", an_dataset, "dataset the trace was trained on")->required();
  analyze->add_option("--window", an_window, "trailing epoch window for frequencies")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> tr_checkpoints, tr_datasets;
  std::uint64_t tr_seed = 0;
  CLI::App* transfer =
      app.add_subcommand("transfer", "evaluate frozen checkpoints on other datasets");
  transfer->add_option("--checkpoint", tr_checkpoints, "checkpoint file (repeatable)")
      ->required();
  transfer->add_option("--dataset", tr_datasets, "target dataset spec (repeatable)")
      ->required();
  transfer->add_option("--seed", tr_seed, "split seed for the target task");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run, run_opt, run_dataset);
    if (sweep->parsed()) return cmd_sweep(sweep, sweep_opt);
    if (compare->parsed())
      return cmd_compare(cmp_results, cmp_a, cmp_b, cmp_dataset, cmp_task);
    if (analyze->parsed()) return cmd_anchors_analyze(an_trace, an_dataset, an_window);
    if (transfer->parsed()) return cmd_transfer(tr_checkpoints, tr_datasets, tr_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
