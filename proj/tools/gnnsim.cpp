// Command-line front end: dataset generation, model management, single-query
// and batch runs, architecture comparison, golden-vs-simulator validation and
// report emission. Every command is deterministic given its inputs and seed;
// written reports embed a hash of the resolved run manifest.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gnnsim/dataset.hpp"
#include "gnnsim/golden.hpp"
#include "gnnsim/graph.hpp"
#include "gnnsim/model.hpp"
#include "gnnsim/preproc.hpp"
#include "gnnsim/sim/arch_config.hpp"
#include "gnnsim/sim/batch.hpp"
#include "gnnsim/sim/query.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fmt(double v, int prec) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

void write_text(const fs::path& p, const std::string& body) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << body;
}

std::vector<std::uint32_t> parse_u32_list(const std::string& s, const char* what) {
  std::vector<std::uint32_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      out.push_back(static_cast<std::uint32_t>(std::stoul(item)));
    } catch (const std::exception&) {
      throw std::runtime_error(std::string("bad ") + what + " entry: " + item);
    }
  }
  if (out.empty()) throw std::runtime_error(std::string(what) + " list is empty");
  return out;
}

std::vector<std::pair<const gnnsim::Graph*, const gnnsim::Graph*>> make_pairs(
    const std::vector<gnnsim::Graph>& graphs, std::uint32_t max_pairs) {
  if (graphs.size() < 2) {
    throw std::runtime_error("dataset needs at least 2 graphs to form query pairs");
  }
  std::vector<std::pair<const gnnsim::Graph*, const gnnsim::Graph*>> pairs;
  for (std::size_t i = 0; i + 1 < graphs.size(); i += 2) {
    pairs.emplace_back(&graphs[i], &graphs[i + 1]);
    if (max_pairs != 0 && pairs.size() == max_pairs) break;
  }
  return pairs;
}

std::string stream_csv(const gnnsim::EdgeStream& s) {
  std::string out = "pos,src,dst,weight\n";
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    const auto& e = s.entries[i];
    out += std::to_string(i);
    if (e.is_bubble()) {
      out += ",B,B,0\n";
    } else {
      char buf[64];
      std::snprintf(buf, sizeof buf, ",%u,%u,%.9g\n", e.src, e.dst,
                    static_cast<double>(e.weight));
      out += buf;
    }
  }
  return out;
}

struct ConfigRow {
  std::string name;
  std::string mode;
  double mean_cycles = 0.0;
  double speedup = 1.0;
  double bubble_pct = 0.0;
  double lb_ratio = 0.0;
};

// ---------------------------------------------------------------- gen-data

struct GenDataArgs {
  std::uint64_t seed = 7;
  std::uint32_t count = 200;
  double node_mean = 25.6;
  double edge_mean = 27.6;
  std::uint32_t vocab = 29;
  std::string out;
};

int cmd_gen_data(const GenDataArgs& a) {
  gnnsim::DatasetSpec spec{a.seed, a.count, a.node_mean, a.edge_mean, a.vocab};
  const std::vector<gnnsim::Graph> graphs = gnnsim::generate_dataset(spec);
  gnnsim::write_dataset(graphs, spec, a.out);
  std::cout << "wrote " << graphs.size() << " graphs to " << a.out << "\n";
  return 0;
}

// ---------------------------------------------------------------- model

struct ModelNewArgs {
  std::uint64_t seed = 42;
  std::string dims = "29,64,32,16";
  std::uint32_t k = 16;
  std::string out;
};

int cmd_model_new(const ModelNewArgs& a) {
  const std::vector<std::uint32_t> d = parse_u32_list(a.dims, "dims");
  if (d.size() != 4) throw std::runtime_error("--dims needs exactly 4 comma-separated values");
  const gnnsim::SimGnnModel m =
      gnnsim::random_model(a.seed, {d[0], d[1], d[2], d[3]}, a.k);
  gnnsim::save_model(m, a.out);
  std::cout << "wrote model (dims " << a.dims << ", k " << a.k << ") to " << a.out << "\n";
  return 0;
}

int cmd_model_inspect(const std::string& path) {
  const gnnsim::SimGnnModel m = gnnsim::load_model(path);
  std::size_t params = m.att.size() + m.ntn_w.size() + m.ntn_v.size() + m.ntn_b.size();
  for (const auto& l : m.gcn) params += l.w.size() + l.b.size();
  for (const auto& l : m.fcn) params += l.w.size() + l.b.size();
  ordered_json j;
  j["dims"] = m.dims;
  j["k"] = m.k;
  auto widths = ordered_json::array();
  for (const auto& l : m.fcn) widths.push_back(l.out);
  j["fcn_widths"] = widths;
  j["parameters"] = params;
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  j["file_hash"] = hash_hex(fnv1a64(ss.str()));
  std::cout << j.dump(2) << "\n";
  return 0;
}

// ---------------------------------------------------------------- run

struct RunArgs {
  std::string graph_a, graph_b, model, config, out;
  std::string format = "json";
  std::uint64_t seed = 0;
  bool validate = false;
  bool dump_edge_stream = false;
};

int cmd_run(const RunArgs& a) {
  const gnnsim::SimGnnModel model = gnnsim::load_model(a.model);
  const gnnsim::sim::ArchConfig cfg = gnnsim::sim::load_arch_config(a.config);
  const gnnsim::Graph ga = gnnsim::load_graph(a.graph_a);
  const gnnsim::Graph gb = gnnsim::load_graph(a.graph_b);

  const gnnsim::sim::QueryResult q = gnnsim::sim::simulate_query(ga, gb, model, cfg);

  ordered_json manifest;
  manifest["command"] = "run";
  manifest["graph_a"] = a.graph_a;
  manifest["graph_b"] = a.graph_b;
  manifest["model"] = a.model;
  manifest["config"] = a.config;
  manifest["seed"] = a.seed;
  manifest["format"] = a.format;
  manifest["validate"] = a.validate;
  const std::string mhash = hash_hex(fnv1a64(manifest.dump()));

  std::cout << "mode=" << gnnsim::sim::mode_name(cfg.mode) << " score=" << fmt_g(q.score)
            << " total_cycles=" << q.report.total_kernel_cycles
            << " lower_bound=" << q.report.lower_bound_cycles << "\n";

  double golden = 0.0;
  if (a.validate) {
    golden = gnnsim::simgnn_score(ga, gb, model);
    const double delta = std::abs(golden - q.score);
    const double rel = delta / std::max(std::abs(golden), 1e-300);
    std::cout << "golden=" << fmt_g(golden) << " abs_delta=" << fmt_g(delta)
              << " rel_delta=" << fmt_g(rel) << "\n";
  }

  if (a.dump_edge_stream && a.out.empty()) {
    throw std::runtime_error("--dump-edge-stream needs --out");
  }
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    if (a.format == "json") {
      ordered_json j;
      j["manifest"] = manifest;
      j["manifest_hash"] = mhash;
      j["seed"] = a.seed;
      j["mode"] = gnnsim::sim::mode_name(cfg.mode);
      j["score"] = q.score;
      if (a.validate) {
        j["golden_score"] = golden;
        j["abs_delta"] = std::abs(golden - q.score);
      }
      j["report"] = ordered_json::parse(q.report.to_json());
      write_text(fs::path(a.out) / "report.json", j.dump(2) + "\n");
    } else {
      std::string body;
      body += "key,value\n";
      body += "manifest_hash," + mhash + "\n";
      body += "seed," + std::to_string(a.seed) + "\n";
      body += "mode," + std::string(gnnsim::sim::mode_name(cfg.mode)) + "\n";
      body += "score," + fmt_g(q.score) + "\n";
      body += "total_kernel_cycles," + std::to_string(q.report.total_kernel_cycles) + "\n";
      body += "lower_bound_cycles," + std::to_string(q.report.lower_bound_cycles) + "\n";
      body += "\n" + q.report.to_csv();
      write_text(fs::path(a.out) / "report.csv", body);
    }
    if (a.dump_edge_stream) {
      const std::uint32_t l = cfg.lat_acc;
      const gnnsim::EdgeStream sa = gnnsim::reorder_edges(gnnsim::normalize_adjacency(ga), l);
      const gnnsim::EdgeStream sb = gnnsim::reorder_edges(gnnsim::normalize_adjacency(gb), l);
      write_text(fs::path(a.out) / "edge_stream_a.csv", stream_csv(sa));
      write_text(fs::path(a.out) / "edge_stream_b.csv", stream_csv(sb));
    }
  }
  return 0;
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
  std::string dataset, model, out;
  std::vector<std::string> configs;
  std::string format = "json";
  std::uint64_t seed = 0;
  std::uint32_t max_pairs = 0;
};

int cmd_compare(const CompareArgs& a) {
  if (a.configs.size() < 2) throw std::runtime_error("compare needs at least 2 --config files");
  const gnnsim::SimGnnModel model = gnnsim::load_model(a.model);
  const std::vector<gnnsim::Graph> graphs = gnnsim::load_dataset(a.dataset);
  const auto pairs = make_pairs(graphs, a.max_pairs);

  std::vector<ConfigRow> rows;
  for (const std::string& cpath : a.configs) {
    const gnnsim::sim::ArchConfig cfg = gnnsim::sim::load_arch_config(cpath);
    std::uint64_t total = 0, bound = 0, bubble = 0, busy = 0;
    for (const auto& [g1, g2] : pairs) {
      const gnnsim::sim::QueryResult q = gnnsim::sim::simulate_query(*g1, *g2, model, cfg);
      total += q.report.total_kernel_cycles;
      bound += q.report.lower_bound_cycles;
      for (const auto& [name, m] : q.report.modules) {
        (void)name;
        bubble += m.bubble;
        busy += m.active + m.bubble;
      }
    }
    ConfigRow r;
    r.name = fs::path(cpath).stem().string();
    r.mode = gnnsim::sim::mode_name(cfg.mode);
    r.mean_cycles = static_cast<double>(total) / static_cast<double>(pairs.size());
    r.speedup = rows.empty() ? 1.0 : rows.front().mean_cycles / r.mean_cycles;
    r.bubble_pct = busy == 0 ? 0.0
                             : 100.0 * static_cast<double>(bubble) / static_cast<double>(busy);
    r.lb_ratio = bound == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(bound);
    rows.push_back(std::move(r));
  }

  std::printf("%-16s %-22s %14s %9s %9s %9s\n", "config", "mode", "mean_cycles", "speedup",
              "bubble%", "lb_ratio");
  for (const ConfigRow& r : rows) {
    std::printf("%-16s %-22s %14s %9s %9s %9s\n", r.name.c_str(), r.mode.c_str(),
                fmt(r.mean_cycles, 2).c_str(), fmt(r.speedup, 3).c_str(),
                fmt(r.bubble_pct, 2).c_str(), fmt(r.lb_ratio, 3).c_str());
  }

  if (!a.out.empty()) {
    fs::create_directories(a.out);
    ordered_json manifest;
    manifest["command"] = "compare";
    manifest["dataset"] = a.dataset;
    manifest["model"] = a.model;
    manifest["configs"] = a.configs;
    manifest["seed"] = a.seed;
    manifest["format"] = a.format;
    manifest["max_pairs"] = a.max_pairs;
    manifest["pairs"] = pairs.size();
    const std::string mhash = hash_hex(fnv1a64(manifest.dump()));

    std::string csv = "config,mode,mean_cycles,speedup_vs_first,bubble_pct,lower_bound_ratio\n";
    for (const ConfigRow& r : rows) {
      csv += r.name + "," + r.mode + "," + fmt(r.mean_cycles, 2) + "," + fmt(r.speedup, 3) +
             "," + fmt(r.bubble_pct, 2) + "," + fmt(r.lb_ratio, 3) + "\n";
    }
    write_text(fs::path(a.out) / "compare.csv", csv);
    if (a.format == "json") {
      ordered_json j;
      j["manifest"] = manifest;
      j["manifest_hash"] = mhash;
      j["seed"] = a.seed;
      auto arr = ordered_json::array();
      for (const ConfigRow& r : rows) {
        ordered_json e;
        e["config"] = r.name;
        e["mode"] = r.mode;
        e["mean_cycles"] = r.mean_cycles;
        e["speedup_vs_first"] = r.speedup;
        e["bubble_pct"] = r.bubble_pct;
        e["lower_bound_ratio"] = r.lb_ratio;
        arr.push_back(std::move(e));
      }
      j["rows"] = std::move(arr);
      write_text(fs::path(a.out) / "compare.json", j.dump(2) + "\n");
    }
  }
  return 0;
}

// ---------------------------------------------------------------- batch

struct BatchArgs {
  std::string dataset, model, config, out;
  std::string sizes = "1,2,4,8,16,32,64,128,200,300";
  std::string format = "json";
  std::uint64_t seed = 0;
  std::uint32_t replicas = 1;
  std::uint32_t threads = 0;
  std::uint32_t max_pairs = 0;
};

int cmd_batch(const BatchArgs& a) {
  const gnnsim::SimGnnModel model = gnnsim::load_model(a.model);
  const gnnsim::sim::ArchConfig cfg = gnnsim::sim::load_arch_config(a.config);
  const std::vector<gnnsim::Graph> graphs = gnnsim::load_dataset(a.dataset);
  const auto pairs = make_pairs(graphs, a.max_pairs);
  const std::vector<std::uint32_t> sizes = parse_u32_list(a.sizes, "batch-sizes");

  const gnnsim::sim::BatchResult res =
      gnnsim::sim::simulate_batch(pairs, model, cfg, sizes, a.replicas, a.threads);

  std::cout << "queries=" << pairs.size() << " replicas=" << res.replicas
            << " mean_kernel_cycles=" << fmt(res.mean_kernel_cycles, 2)
            << " invocation_overhead=" << cfg.invocation_overhead << "\n";
  std::string csv = "batch_size,avg_cycles_per_query,speedup_vs_batch1\n";
  for (const auto& p : res.points) {
    csv += std::to_string(p.batch_size) + "," + fmt(p.avg_cycles_per_query, 4) + "," +
           fmt(p.speedup_vs_batch1, 4) + "\n";
  }
  std::cout << csv;

  if (!a.out.empty()) {
    fs::create_directories(a.out);
    ordered_json manifest;
    manifest["command"] = "batch";
    manifest["dataset"] = a.dataset;
    manifest["model"] = a.model;
    manifest["config"] = a.config;
    manifest["batch_sizes"] = sizes;
    manifest["replicas"] = a.replicas;
    manifest["seed"] = a.seed;
    manifest["format"] = a.format;
    manifest["max_pairs"] = a.max_pairs;
    const std::string mhash = hash_hex(fnv1a64(manifest.dump()));
    write_text(fs::path(a.out) / "batch.csv", csv);
    if (a.format == "json") {
      ordered_json j;
      j["manifest"] = manifest;
      j["manifest_hash"] = mhash;
      j["seed"] = a.seed;
      j["mean_kernel_cycles"] = res.mean_kernel_cycles;
      j["replicas"] = res.replicas;
      auto arr = ordered_json::array();
      for (const auto& p : res.points) {
        ordered_json e;
        e["batch_size"] = p.batch_size;
        e["avg_cycles_per_query"] = p.avg_cycles_per_query;
        e["speedup_vs_batch1"] = p.speedup_vs_batch1;
        arr.push_back(std::move(e));
      }
      j["points"] = std::move(arr);
      write_text(fs::path(a.out) / "batch.json", j.dump(2) + "\n");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph similarity scoring: golden model and accelerator cycle simulator"};
  app.require_subcommand(1);

  GenDataArgs gen;
  CLI::App* c_gen = app.add_subcommand("gen-data", "generate a synthetic graph dataset");
  c_gen->add_option("--seed", gen.seed, "dataset seed");
  c_gen->add_option("--count", gen.count, "number of graphs");
  c_gen->add_option("--node-mean", gen.node_mean, "mean node count");
  c_gen->add_option("--edge-mean", gen.edge_mean, "mean edge count");
  c_gen->add_option("--vocab", gen.vocab, "label vocabulary size");
  c_gen->add_option("--out", gen.out, "output directory")->required();

  CLI::App* c_model = app.add_subcommand("model", "create or inspect model files");
  c_model->require_subcommand(1);
  ModelNewArgs mnew;
  CLI::App* c_mnew = c_model->add_subcommand("new", "write a random model");
  c_mnew->add_option("--seed", mnew.seed, "parameter seed");
  c_mnew->add_option("--dims", mnew.dims, "layer dims f0,f1,f2,F");
  c_mnew->add_option("--k", mnew.k, "NTN slice count");
  c_mnew->add_option("--out", mnew.out, "output file")->required();
  std::string minspect_path;
  CLI::App* c_minspect = c_model->add_subcommand("inspect", "summarize a model file");
  c_minspect->add_option("--model", minspect_path, "model file")->required();

  RunArgs run;
  CLI::App* c_run = app.add_subcommand("run", "simulate one similarity query");
  c_run->add_option("--graph-a", run.graph_a, "first graph")->required();
  c_run->add_option("--graph-b", run.graph_b, "second graph")->required();
  c_run->add_option("--model", run.model, "model file")->required();
  c_run->add_option("--config", run.config, "architecture config")->required();
  c_run->add_option("--out", run.out, "report output directory");
  c_run->add_option("--format", run.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}));
  c_run->add_option("--seed", run.seed, "seed recorded in the report");
  c_run->add_flag("--validate", run.validate, "also run the golden model and print the delta");
  c_run->add_flag("--dump-edge-stream", run.dump_edge_stream,
                  "write reordered edge streams as CSV (needs --out)");

  CompareArgs cmp;
  CLI::App* c_cmp = app.add_subcommand("compare", "compare architecture configs on a dataset");
  c_cmp->add_option("--dataset", cmp.dataset, "dataset directory")->required();
  c_cmp->add_option("--model", cmp.model, "model file")->required();
  c_cmp->add_option("--config", cmp.configs, "architecture config (repeat, >= 2)")
      ->required()
      ->expected(-1);
  c_cmp->add_option("--out", cmp.out, "output directory");
  c_cmp->add_option("--format", cmp.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}));
  c_cmp->add_option("--seed", cmp.seed, "seed recorded in the report");
  c_cmp->add_option("--max-pairs", cmp.max_pairs, "limit query pairs (0 = all)");

  BatchArgs bat;
  CLI::App* c_bat = app.add_subcommand("batch", "amortization curve over batch sizes");
  c_bat->add_option("--dataset", bat.dataset, "dataset directory")->required();
  c_bat->add_option("--model", bat.model, "model file")->required();
  c_bat->add_option("--config", bat.config, "architecture config")->required();
  c_bat->add_option("--batch-sizes", bat.sizes, "comma list of batch sizes");
  c_bat->add_option("--replicas", bat.replicas, "replicated module sets (reported only)");
  c_bat->add_option("--threads", bat.threads, "simulation threads (0 = auto)");
  c_bat->add_option("--out", bat.out, "output directory");
  c_bat->add_option("--format", bat.format, "report format")
      ->check(CLI::IsMember({"json", "csv"}));
  c_bat->add_option("--seed", bat.seed, "seed recorded in the report");
  c_bat->add_option("--max-pairs", bat.max_pairs, "limit query pairs (0 = all)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_gen->parsed()) return cmd_gen_data(gen);
    if (c_model->parsed()) {
      if (c_mnew->parsed()) return cmd_model_new(mnew);
      if (c_minspect->parsed()) return cmd_model_inspect(minspect_path);
    }
    if (c_run->parsed()) return cmd_run(run);
    if (c_cmp->parsed()) return cmd_compare(cmp);
    if (c_bat->parsed()) return cmd_batch(bat);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand\n";
  return 1;
}
