// Command-line driver: dataset generation, exact ground truth, graph builds,
// and recall/QPS sweeps. Exit codes: 0 success, 1 usage or validation,
// 2 I/O or file format trouble.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "graphann/dataset.hpp"
#include "graphann/diskann.hpp"
#include "graphann/eval.hpp"
#include "graphann/graph.hpp"
#include "graphann/hcnng.hpp"
#include "graphann/hnsw.hpp"
#include "graphann/pynndescent.hpp"
#include "graphann/search.hpp"

using namespace graphann;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sniff_magic(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path);
  char magic[4] = {};
  in.read(magic, 4);
  if (!in) throw format_error("file too short: " + path);
  return std::string(magic, 4);
}

struct GenArgs {
  uint64_t seed = 42;
  uint32_t n = 0, dim = 0, clusters = 10, n_queries = 0;
  std::string out, queries_out;
};

void run_gen(const GenArgs& a) {
  if (a.queries_out.empty() != (a.n_queries == 0)) {
    throw std::invalid_argument("--queries-out and --n-queries must be given together");
  }
  uint64_t total = uint64_t{a.n} + a.n_queries;
  if (total > UINT32_MAX) throw std::invalid_argument("n + n-queries too large");

  // Queries are a held-out suffix of the same mixture, never part of the base.
  VectorDataset all = gen_gaussian_mixture(a.seed, static_cast<uint32_t>(total), a.dim,
                                           a.clusters);
  if (a.n_queries == 0) {
    write_vectors(all, a.out, format_from_path(a.out));
    return;
  }
  VectorDataset base = slice_dataset(all, a.n);
  write_vectors(base, a.out, format_from_path(a.out));

  VectorDataset queries(a.n_queries, a.dim, all.elem());
  std::memcpy(queries.data(), all.row_ptr(a.n), queries.bytes());
  write_vectors(queries, a.queries_out, format_from_path(a.queries_out));
}

struct GtArgs {
  std::string base, queries, out, metric = "l2";
  uint32_t k = 0;
  float radius = 0.0f;
  bool has_k = false, has_radius = false;
  size_t threads = 0;
};

void run_gt(const GtArgs& a) {
  if (a.has_k == a.has_radius) {
    throw std::invalid_argument("exactly one of --k and --radius is required");
  }
  Metric metric = metric_from_name(a.metric);
  VectorDataset base = load_vectors(a.base, format_from_path(a.base));
  VectorDataset queries = load_vectors(a.queries, format_from_path(a.queries));

  if (a.has_k) {
    GroundTruth gt = compute_groundtruth(base, queries, a.k, metric, a.threads);
    save_groundtruth(gt, a.out);
  } else {
    RangeGroundTruth gt = compute_range_groundtruth(base, queries, a.radius, metric, a.threads);
    save_range_groundtruth(gt, a.out);
  }
}

struct BuildArgs {
  std::string algo, base, out, metric = "l2", preset, prune = "scale-candidate";
  size_t threads = 0;
  uint64_t seed = 42;
  // diskann
  uint32_t degree = 64, build_beam = 128;
  float alpha = 0.0f;  // 0 = per-algorithm default
  // hnsw
  uint32_t m = 32, efc = 128;
  bool single_layer = false;
  // hcnng
  uint32_t trees = 30, leaf_size = 0, mst_degree = 3, knn_per_leaf = 0;
  // pynndescent
  uint32_t k = 40, init_trees = 10, round_cap = 30, batch_count = 0;
  double delta = 0.001;
};

struct BuildFlagCount {
  bool degree = false, build_beam = false, alpha = false, m = false, efc = false;
  bool trees = false, leaf_size = false, mst_degree = false, knn_per_leaf = false;
  bool k = false, init_trees = false, delta = false;
};

void run_build(const BuildArgs& a, const BuildFlagCount& given) {
  Metric metric = metric_from_name(a.metric);
  PruneRule rule;
  if (a.prune == "scale-candidate") {
    rule = PruneRule::scale_candidate;
  } else if (a.prune == "scale-selected") {
    rule = PruneRule::scale_selected;
  } else {
    throw std::invalid_argument("unknown prune rule: " + a.prune);
  }
  if (!a.preset.empty() && a.preset != "bigann" && a.preset != "spacev" && a.preset != "tti" &&
      a.preset != "ssnpp") {
    throw std::invalid_argument("unknown preset: " + a.preset);
  }

  VectorDataset base = load_vectors(a.base, format_from_path(a.base));
  auto t0 = std::chrono::steady_clock::now();
  double mean_deg = 0.0;
  uint32_t n = base.size();

  if (a.algo == "diskann") {
    DiskannParams p;
    p.seed = a.seed;
    p.rule = rule;
    if (a.preset == "ssnpp") {
      p.degree_bound = 150;
      p.build_beam = 400;
    } else if (!a.preset.empty()) {
      p.degree_bound = 64;
      p.build_beam = 128;
    }
    p.alpha = a.preset == "tti" ? 0.9f : 1.2f;
    if (given.degree) p.degree_bound = a.degree;
    if (given.build_beam) p.build_beam = a.build_beam;
    if (given.alpha) p.alpha = a.alpha;
    NeighborGraph g = build_diskann(base, metric, p, a.threads);
    mean_deg = g.mean_degree();
    save_graph(g, a.out);
  } else if (a.algo == "hnsw") {
    HnswParams p;
    p.seed = a.seed;
    p.rule = rule;
    p.single_layer = a.single_layer;
    if (a.preset == "ssnpp") {
      p.m = 75;
      p.ef_construction = 400;
    } else if (!a.preset.empty()) {
      p.m = 32;
      p.ef_construction = 128;
    }
    if (a.preset == "spacev") p.alpha = 0.83f;
    if (a.preset == "tti") p.alpha = 1.1f;
    if (given.m) p.m = a.m;
    if (given.efc) p.ef_construction = a.efc;
    if (given.alpha) p.alpha = a.alpha;
    HnswIndex index = build_hnsw(base, metric, p, a.threads);
    mean_deg = index.layer(0).mean_degree();
    save_hnsw(index, a.out);
  } else if (a.algo == "hcnng") {
    HcnngParams p;
    p.seed = a.seed;
    if (a.preset == "spacev" || a.preset == "ssnpp") p.trees = 50;
    if (given.trees) p.trees = a.trees;
    if (given.leaf_size) p.leaf_size = a.leaf_size;
    if (given.mst_degree) p.mst_degree = a.mst_degree;
    if (given.knn_per_leaf) p.knn_per_leaf = a.knn_per_leaf;
    NeighborGraph g = build_hcnng(base, metric, p, a.threads);
    mean_deg = g.mean_degree();
    save_graph(g, a.out);
  } else if (a.algo == "pynndescent" || a.algo == "pynnd") {
    PynndParams p;
    p.seed = a.seed;
    p.rule = rule;
    p.round_cap = a.round_cap;
    p.batch_count = a.batch_count;
    if (a.preset == "spacev" || a.preset == "tti" || a.preset == "ssnpp") p.k = 60;
    if (a.preset == "ssnpp") p.leaf_size = 1000;
    if (a.preset == "tti") p.alpha = 0.9f;
    if (a.preset == "ssnpp") p.alpha = 1.4f;
    if (given.k) p.k = a.k;
    if (given.init_trees) p.init_trees = a.init_trees;
    if (given.leaf_size) p.leaf_size = a.leaf_size;
    if (given.alpha) p.alpha = a.alpha;
    if (given.delta) p.delta = a.delta;
    PynndBuildResult result = build_pynndescent(base, metric, p, a.threads);
    if (!result.converged) {
      std::cerr << "warning: descent stopped at the round cap still changing "
                << result.last_change << " of edges\n";
    }
    mean_deg = result.graph.mean_degree();
    save_graph(result.graph, a.out);
  } else {
    throw std::invalid_argument("unknown algorithm: " + a.algo);
  }

  std::printf("algo=%s n=%u build_seconds=%.3f mean_degree=%.2f\n", a.algo.c_str(), n,
              seconds_since(t0), mean_deg);
}

struct EvalArgs {
  std::string index, base, queries, gt, out, pareto, algorithm, dataset_name, metric = "l2";
  std::vector<uint32_t> beams{10, 20, 50, 100, 200};
  std::vector<uint32_t> ks{10};
  std::vector<float> epsilons{0.0f};
  size_t threads = 0;
  uint32_t reps = 1;
  float radius = 0.0f;
  bool has_radius = false;
  double build_seconds = 0.0;
};

void run_eval(const EvalArgs& a) {
  Metric metric = metric_from_name(a.metric);
  VectorDataset base = load_vectors(a.base, format_from_path(a.base));
  VectorDataset queries = load_vectors(a.queries, format_from_path(a.queries));

  std::string magic = sniff_magic(a.index);
  NeighborGraph graph;
  HnswIndex hnsw;
  bool layered = false;
  if (magic == "ANNG") {
    graph = load_graph(a.index);
    if (graph.size() != base.size()) {
      throw std::invalid_argument("index and base dataset disagree on size");
    }
  } else if (magic == "ANNH") {
    hnsw = load_hnsw(a.index);
    layered = true;
    if (hnsw.size() != base.size()) {
      throw std::invalid_argument("index and base dataset disagree on size");
    }
  } else {
    throw format_error("unrecognized index file: " + a.index);
  }

  bool range_mode = sniff_magic(a.gt) == "ANNR";
  if (a.has_radius && !range_mode) {
    throw std::invalid_argument("--radius given but the ground truth is not range format");
  }

  EvalMeta meta;
  meta.algorithm = !a.algorithm.empty() ? a.algorithm : (layered ? "hnsw" : "graph");
  meta.dataset = !a.dataset_name.empty()
                     ? a.dataset_name
                     : std::filesystem::path(a.base).stem().string();
  meta.n = base.size();
  meta.build_seconds = a.build_seconds;

  SweepConfig sweep;
  sweep.beams = a.beams;
  sweep.ks = a.ks;
  sweep.epsilons = a.epsilons;
  sweep.threads = a.threads;
  sweep.repetitions = a.reps;

  // One untimed pass touches the index and both datasets before measurement.
  {
    uint32_t warm_beam = *std::max_element(a.beams.begin(), a.beams.end());
    SearchParams warm{warm_beam, 1, 0.0f};
    for (uint32_t qi = 0; qi < queries.size(); ++qi) {
      if (layered) {
        search_hnsw(hnsw, base, metric, queries.row(qi), warm);
      } else {
        beam_search(graph, base, metric, queries.row(qi), warm);
      }
    }
  }

  EvalReport report;
  if (range_mode) {
    RangeGroundTruth gt = load_range_groundtruth(a.gt);
    float radius = gt.radius;
    if (a.has_radius) {
      if (std::abs(a.radius - gt.radius) > 1e-6f * std::max(1.0f, std::abs(gt.radius))) {
        throw std::invalid_argument("--radius disagrees with the ground truth radius");
      }
      radius = a.radius;
    }
    const NeighborGraph& flat = layered ? hnsw.layer(0) : graph;
    report = run_range_sweep(
        [&](uint32_t qi, const SearchParams& p) {
          return range_search(flat, base, metric, queries.row(qi), radius, p);
        },
        queries, gt, sweep, meta);
  } else {
    GroundTruth gt = load_groundtruth(a.gt);
    report = run_sweep(
        [&](uint32_t qi, const SearchParams& p) {
          return layered ? search_hnsw(hnsw, base, metric, queries.row(qi), p)
                         : beam_search(graph, base, metric, queries.row(qi), p);
        },
        queries, gt, sweep, meta);
  }

  if (a.out.empty()) {
    write_csv(report, std::cout);
  } else {
    write_csv(report, a.out);
  }
  if (!a.pareto.empty()) {
    EvalReport frontier{report.meta, pareto_frontier(report.rows)};
    write_csv(frontier, a.pareto);
  }
}

}  // namespace

// --config support: the file supplies defaults in "key = value" lines (keys
// are the long flag names, # starts a comment line); anything given
// explicitly on the command line wins. Implemented by splicing the file's
// entries into the argument list before parsing.
std::vector<std::string> inject_config(std::vector<std::string> args) {
  size_t pos = args.size();
  std::string path;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config needs a file path");
      path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      pos = i;
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + i);
      pos = i;
      break;
    }
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw io_error("cannot open config: " + path);

  auto trim = [](const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  auto given = [&](const std::string& key) {
    std::string flag = "--" + key;
    for (const std::string& a : args) {
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
  };

  std::vector<std::string> extra;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    std::string key = eq == std::string::npos ? std::string() : trim(t.substr(0, eq));
    std::string value = eq == std::string::npos ? std::string() : trim(t.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    if (!given(key)) extra.push_back("--" + key + "=" + value);
  }
  args.insert(args.begin() + pos, extra.begin(), extra.end());
  return args;
}


int main(int argc, char** argv) {
  CLI::App app{"graph-based approximate nearest neighbor toolkit"};
  app.require_subcommand(1);

  // handled before parsing; registered here so each subcommand's help and
  // unknown-flag checks know about it
  std::string config_sink;

  GenArgs gen;
  CLI::App* cmd_gen = app.add_subcommand("gen", "generate a Gaussian-mixture dataset");
  cmd_gen->add_option("--config", config_sink, "key = value defaults file (flags win)");
  cmd_gen->add_option("--seed", gen.seed, "random seed");
  cmd_gen->add_option("--n", gen.n, "number of base points")
      ->required()
      ->check(CLI::PositiveNumber);
  cmd_gen->add_option("--d,--dim", gen.dim, "dimensions")->required()->check(CLI::PositiveNumber);
  cmd_gen->add_option("--clusters", gen.clusters, "mixture components")
      ->check(CLI::PositiveNumber);
  cmd_gen->add_option("--out", gen.out, "output dataset path")->required();
  cmd_gen->add_option("--n-queries", gen.n_queries, "held-out query count");
  cmd_gen->add_option("--queries-out", gen.queries_out, "held-out query path");
  cmd_gen->callback([&] { run_gen(gen); });

  GtArgs gt;
  CLI::App* cmd_gt = app.add_subcommand("gt", "compute exact ground truth");
  cmd_gt->add_option("--config", config_sink, "key = value defaults file (flags win)");
  cmd_gt->add_option("--base", gt.base, "base dataset")->required();
  cmd_gt->add_option("--queries", gt.queries, "query dataset")->required();
  cmd_gt->add_option("--out", gt.out, "output path")->required();
  cmd_gt->add_option("--metric", gt.metric, "l2 or ip");
  auto* gt_k = cmd_gt->add_option("--k", gt.k, "neighbors per query");
  auto* gt_r = cmd_gt->add_option("--radius", gt.radius, "range mode radius");
  cmd_gt->add_option("--threads", gt.threads, "worker count (0 = hardware)");
  cmd_gt->callback([&] {
    gt.has_k = gt_k->count() > 0;
    gt.has_radius = gt_r->count() > 0;
    run_gt(gt);
  });

  BuildArgs build;
  CLI::App* cmd_build = app.add_subcommand("build", "build a graph index");
  cmd_build->add_option("--config", config_sink, "key = value defaults file (flags win)");
  cmd_build->add_option("--algo", build.algo, "diskann, hnsw, hcnng or pynndescent")->required();
  cmd_build->add_option("--base", build.base, "base dataset")->required();
  cmd_build->add_option("--out", build.out, "output index path")->required();
  cmd_build->add_option("--metric", build.metric, "l2 or ip");
  cmd_build->add_option("--preset", build.preset, "bigann, spacev, tti or ssnpp");
  cmd_build->add_option("--threads", build.threads, "worker count (0 = hardware)");
  cmd_build->add_option("--seed", build.seed, "random seed");
  cmd_build->add_option("--prune-rule", build.prune, "scale-candidate or scale-selected");
  auto* o_degree = cmd_build->add_option("--degree", build.degree, "out-degree bound");
  auto* o_bbeam = cmd_build->add_option("--build-beam", build.build_beam, "construction beam");
  auto* o_alpha = cmd_build->add_option("--alpha", build.alpha, "prune slack");
  auto* o_m = cmd_build->add_option("--m", build.m, "layer degree parameter");
  auto* o_efc = cmd_build->add_option("--ef-construction", build.efc, "construction beam");
  cmd_build->add_flag("--single-layer", build.single_layer, "force a flat layered build");
  auto* o_trees = cmd_build->add_option("--trees", build.trees, "clustering rounds");
  auto* o_leaf = cmd_build->add_option("--leaf-size", build.leaf_size, "cluster leaf bound");
  auto* o_mstd = cmd_build->add_option("--mst-degree", build.mst_degree, "per-tree degree cap");
  auto* o_knnl = cmd_build->add_option("--knn-per-leaf", build.knn_per_leaf,
                                       "candidate edges per point");
  auto* o_k = cmd_build->add_option("--k", build.k, "descent degree bound");
  auto* o_itrees = cmd_build->add_option("--init-trees", build.init_trees, "init tree count");
  auto* o_delta = cmd_build->add_option("--delta", build.delta, "convergence fraction");
  cmd_build->add_option("--round-cap", build.round_cap, "descent round limit");
  cmd_build->add_option("--batch-count", build.batch_count, "two-hop batching (0 = auto)");
  cmd_build->callback([&] {
    BuildFlagCount given;
    given.degree = o_degree->count() > 0;
    given.build_beam = o_bbeam->count() > 0;
    given.alpha = o_alpha->count() > 0;
    given.m = o_m->count() > 0;
    given.efc = o_efc->count() > 0;
    given.trees = o_trees->count() > 0;
    given.leaf_size = o_leaf->count() > 0;
    given.mst_degree = o_mstd->count() > 0;
    given.knn_per_leaf = o_knnl->count() > 0;
    given.k = o_k->count() > 0;
    given.init_trees = o_itrees->count() > 0;
    given.delta = o_delta->count() > 0;
    run_build(build, given);
  });

  EvalArgs eval;
  CLI::App* cmd_eval = app.add_subcommand("eval", "sweep recall and QPS on a built index");
  cmd_eval->add_option("--config", config_sink, "key = value defaults file (flags win)");
  cmd_eval->add_option("--index", eval.index, "index file")->required();
  cmd_eval->add_option("--base", eval.base, "base dataset")->required();
  cmd_eval->add_option("--queries", eval.queries, "query dataset")->required();
  cmd_eval->add_option("--gt", eval.gt, "ground truth file")->required();
  cmd_eval->add_option("--out", eval.out, "CSV path (default stdout)");
  cmd_eval->add_option("--pareto", eval.pareto, "also write the Pareto frontier CSV here");
  cmd_eval->add_option("--metric", eval.metric, "l2 or ip");
  cmd_eval->add_option("--beams", eval.beams, "beam widths")->delimiter(',');
  cmd_eval->add_option("--ks", eval.ks, "result counts")->delimiter(',');
  cmd_eval->add_option("--epsilons", eval.epsilons, "expansion slacks")->delimiter(',');
  cmd_eval->add_option("--threads", eval.threads, "query workers (0 = hardware)");
  cmd_eval->add_option("--reps", eval.reps, "repetitions per sweep point")
      ->check(CLI::PositiveNumber);
  auto* e_radius = cmd_eval->add_option("--radius", eval.radius, "range mode radius");
  cmd_eval->add_option("--algorithm", eval.algorithm, "algorithm label for the CSV");
  cmd_eval->add_option("--dataset-name", eval.dataset_name, "dataset label for the CSV");
  cmd_eval->add_option("--build-seconds", eval.build_seconds, "build time to stamp into the CSV");
  cmd_eval->callback([&] {
    eval.has_radius = e_radius->count() > 0;
    run_eval(eval);
  });

  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = inject_config(std::move(args));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
