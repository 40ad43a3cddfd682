// Acceptance run: twelve end-to-end checks, one line each, exit code equals
// the number of failures. Quantitative floors and tolerances are pinned
// inline next to each check.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "graphann/builder_common.hpp"
#include "graphann/dataset.hpp"
#include "graphann/diskann.hpp"
#include "graphann/eval.hpp"
#include "graphann/graph.hpp"
#include "graphann/hcnng.hpp"
#include "graphann/hnsw.hpp"
#include "graphann/metric.hpp"
#include "graphann/pynndescent.hpp"
#include "graphann/search.hpp"
#include "graphann/semisort.hpp"
#include "test_util.hpp"

using namespace graphann;

namespace {

int g_failures = 0;

void report(int num, bool pass, const std::string& text) {
  std::printf("[%s] %2d. %s\n", pass ? "PASS" : "FAIL", num, text.c_str());
  std::fflush(stdout);
  if (!pass) g_failures++;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

// ---- shared desk-scale data -------------------------------------------------

struct Desk {
  VectorDataset base;     // 10000 x 16, ten Gaussian clusters
  VectorDataset queries;  // 1000 held out from the same mixture
  GroundTruth truth;      // exact top-10

  // criterion-3 builds, timed, four workers
  NeighborGraph diskann;
  HnswIndex hnsw;
  NeighborGraph hcnng;
  PynndBuildResult pynnd;
  double secs[4] = {0, 0, 0, 0};
};

DiskannParams desk_diskann_params() {
  DiskannParams p;
  p.degree_bound = 32;
  p.build_beam = 64;
  p.alpha = 1.2f;
  return p;
}
HnswParams desk_hnsw_params() {
  HnswParams p;
  p.m = 16;
  p.ef_construction = 64;
  return p;
}
HcnngParams desk_hcnng_params() {
  HcnngParams p;
  p.trees = 10;
  p.leaf_size = 500;
  p.mst_degree = 3;
  return p;
}
PynndParams desk_pynnd_params() {
  PynndParams p;
  p.k = 20;
  return p;
}

Desk make_desk(size_t workers) {
  Desk d;
  VectorDataset all = gen_gaussian_mixture(7, 11000, 16, 10);
  d.base = slice_dataset(all, 10000);
  d.queries = VectorDataset(1000, 16, all.elem());
  std::memcpy(d.queries.data(), all.row_ptr(10000), d.queries.bytes());
  d.truth = compute_groundtruth(d.base, d.queries, 10, Metric::l2_squared, workers);

  auto t0 = std::chrono::steady_clock::now();
  d.diskann = build_diskann(d.base, Metric::l2_squared, desk_diskann_params(), workers);
  d.secs[0] = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  d.hnsw = build_hnsw(d.base, Metric::l2_squared, desk_hnsw_params(), workers);
  d.secs[1] = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  d.hcnng = build_hcnng(d.base, Metric::l2_squared, desk_hcnng_params(), workers);
  d.secs[2] = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  d.pynnd = build_pynndescent(d.base, Metric::l2_squared, desk_pynnd_params(), workers);
  d.secs[3] = seconds_since(t0);
  return d;
}

using Dispatch = std::function<SearchResult(uint32_t, const SearchParams&)>;

Dispatch flat_dispatch(const NeighborGraph& g, const Desk& d) {
  return [&](uint32_t qi, const SearchParams& p) {
    return beam_search(g, d.base, Metric::l2_squared, d.queries.row(qi), p);
  };
}
Dispatch layered_dispatch(const HnswIndex& index, const Desk& d) {
  return [&](uint32_t qi, const SearchParams& p) {
    return search_hnsw(index, d.base, Metric::l2_squared, d.queries.row(qi), p);
  };
}

struct SweepPoint {
  uint32_t beam = 0;
  float eps = 0.0f;
  double recall = 0.0;
  double comps = 0.0;
};

// recall and mean comparisons at one parameter setting, all 1000 queries
SweepPoint probe(const Dispatch& search, const Desk& d, uint32_t beam, float eps) {
  SweepPoint pt{beam, eps, 0.0, 0.0};
  for (uint32_t qi = 0; qi < d.queries.size(); qi++) {
    SearchResult r = search(qi, SearchParams{beam, 10, eps});
    std::vector<uint32_t> ids;
    for (const Neighbor& nb : r.neighbors) ids.push_back(nb.id);
    pt.recall += recall_k_at_n({d.truth.ids_row(qi), 10}, {d.truth.dists_row(qi), 10}, ids, 10);
    pt.comps += static_cast<double>(r.dist_comps);
  }
  pt.recall /= d.queries.size();
  pt.comps /= d.queries.size();
  return pt;
}

// cheapest sweep point at or above the floor, scanning beams <= 200
SweepPoint best_qualifying(const Dispatch& search, const Desk& d, double floor) {
  SweepPoint best;
  bool found = false;
  for (uint32_t beam : {20u, 50u, 100u, 200u}) {
    for (float eps : {0.0f, 0.1f, 0.25f}) {
      SweepPoint pt = probe(search, d, beam, eps);
      if (pt.recall >= floor && (!found || pt.comps < best.comps)) {
        best = pt;
        found = true;
      }
    }
  }
  if (!found) best.recall = -1.0;  // sentinel: nothing qualified
  return best;
}

// ---- invariant helpers for criterion 7 --------------------------------------

bool hnsw_invariants(const HnswIndex& index, std::string& why) {
  for (uint32_t l = 0; l < index.num_layers(); l++) {
    const NeighborGraph& g = index.layer(l);
    try {
      check_graph_invariants(g);
    } catch (const std::exception& e) {
      why = fmt("layer %u: %s", l, e.what());
      return false;
    }
    uint32_t cap = l == 0 ? 2 * index.m() : index.m();
    if (g.capacity() != cap) {
      why = fmt("layer %u capacity %u, expected %u", l, g.capacity(), cap);
      return false;
    }
    for (uint32_t v = 0; v < g.size(); v++) {
      bool member = index.level(v) >= l;
      if (!member && g.degree(v) != 0) {
        why = fmt("vertex %u has edges above its level", v);
        return false;
      }
      for (uint32_t u : g.out_neighbors(v)) {
        if (index.level(u) < l) {
          why = fmt("layer %u edge %u->%u leaves the layer", l, v, u);
          return false;
        }
      }
    }
  }
  if (index.level(index.entry()) != index.num_layers() - 1) {
    why = "entry is not on the top layer";
    return false;
  }
  return true;
}

// one clustering tree's MSTs: forests under the degree cap
bool hcnng_tree_invariants(const VectorDataset& ds, size_t workers, std::string& why) {
  std::vector<uint32_t> all(ds.size());
  std::iota(all.begin(), all.end(), 0);
  std::vector<DistanceCounter> counters(8);
  auto leaves = cluster_leaves(ds, Metric::l2_squared, all, 500, 12345, workers, counters);

  size_t total = 0;
  for (const auto& leaf : leaves) total += leaf.size();
  if (total != ds.size()) {
    why = "leaves do not partition the points";
    return false;
  }
  DistanceCounter c;
  for (const auto& leaf : leaves) {
    auto edges = leaf_mst(ds, Metric::l2_squared, leaf, 3, 10, c);
    std::map<uint32_t, uint32_t> degree, comp;
    for (uint32_t id : leaf) comp[id] = id;
    std::function<uint32_t(uint32_t)> find = [&](uint32_t x) {
      return comp[x] == x ? x : comp[x] = find(comp[x]);
    };
    for (const auto& e : edges) {
      if (++degree[e.u] > 3 || ++degree[e.v] > 3) {
        why = "tree degree cap exceeded";
        return false;
      }
      uint32_t ru = find(e.u), rv = find(e.v);
      if (ru == rv) {
        why = "cycle inside a leaf tree";
        return false;
      }
      comp[ru] = rv;
    }
  }
  return true;
}

// distances in every refreshed list never get worse round over round
bool pynnd_round_monotonic(const VectorDataset& ds, size_t workers, std::string& why) {
  PynndParams params = desk_pynnd_params();
  std::vector<DistanceCounter> counters(8);
  auto g = init_knn_graph(ds, Metric::l2_squared, params, workers, counters);
  DistanceCounter c;
  auto dists_of = [&](const NeighborGraph& graph, uint32_t v) {
    std::vector<float> out;
    for (uint32_t u : graph.out_neighbors(v))
      out.push_back(distance(Metric::l2_squared, ds.row(v), ds.row(u), c));
    std::sort(out.begin(), out.end());
    return out;
  };
  auto cur = g.clone();
  for (int round = 0; round < 2; round++) {
    auto next = descent_round(cur, ds, Metric::l2_squared, params, 900 + round, workers,
                              counters);
    for (uint32_t v = 0; v < ds.size(); v++) {
      auto before = dists_of(cur, v);
      auto after = dists_of(next.graph, v);
      if (after.size() < before.size()) {
        why = fmt("vertex %u list shrank in round %d", v, round);
        return false;
      }
      for (size_t j = 0; j < before.size(); j++) {
        if (after[j] > before[j] * (1.0f + 1e-6f) + 1e-6f) {
          why = fmt("vertex %u slot %zu worsened in round %d", v, j, round);
          return false;
        }
      }
    }
    cur = next.graph.clone();
  }
  return true;
}

double recall_at(const Dispatch& search, const Desk& d) {
  return probe(search, d, 100, 0.1f).recall;
}

// ---- criteria ----------------------------------------------------------------

void criterion_1() {
  auto t0 = std::chrono::steady_clock::now();
  // ten points, two queries, the expected tables enumerated by hand:
  //   q(0,0): 0@0, 1@1, 2@1, 9@2 (ties 1,2 resolve by id)
  //   q(5,5): 4@0, 5@1, 6@1, 3@18
  std::vector<float> pts = {0, 0, 1, 0, 0, 1, 2, 2, 5, 5, 5, 6, 6, 5, 9, 9, 9, 8, 1, 1};
  std::vector<float> qs = {0, 0, 5, 5};
  auto ds = testutil::make_f32(pts, 10, 2);
  auto queries = testutil::make_f32(qs, 2, 2);

  GroundTruth gt = compute_groundtruth(ds, queries, 4, Metric::l2_squared, 1);
  const uint32_t want_ids[2][4] = {{0, 1, 2, 9}, {4, 5, 6, 3}};
  const float want_dists[2][4] = {{0, 1, 1, 2}, {0, 1, 1, 18}};
  bool ok = gt.k == 4 && gt.queries() == 2;
  for (uint32_t q = 0; q < 2 && ok; q++) {
    for (uint32_t j = 0; j < 4; j++) {
      ok = ok && gt.ids_row(q)[j] == want_ids[q][j];
      ok = ok && gt.dists_row(q)[j] == want_dists[q][j];
    }
  }
  double secs = seconds_since(t0);
  ok = ok && secs < 1.0;
  report(1, ok, fmt("exact oracle on the ten point fixture (%.3fs)", secs));
}

void criterion_2() {
  int mismatches = 0;

  // complete graph: every vertex one hop away, the gate alone does the work
  {
    VectorDataset all = gen_gaussian_mixture(32, 1100, 8, 5);
    VectorDataset ds = slice_dataset(all, 1000);
    NeighborGraph g(1000, 999);
    std::vector<uint32_t> nbrs(999);
    for (uint32_t v = 0; v < 1000; v++) {
      uint32_t w = 0;
      for (uint32_t u = 0; u < 1000; u++)
        if (u != v) nbrs[w++] = u;
      g.set_neighbors(v, nbrs);
    }
    DistanceCounter c;
    for (uint32_t qi = 0; qi < 100; qi++) {
      VectorView q = all.row(1000 + qi);
      auto truth = testutil::oracle_knn(ds, testutil::row_f32(all, 1000 + qi), 10);
      SearchResult r = beam_search(g, ds, Metric::l2_squared, q, SearchParams{1000, 10, 0.0f}, &c);
      if (r.neighbors.size() != 10) mismatches++;
      for (size_t j = 0; j < r.neighbors.size(); j++)
        if (r.neighbors[j].id != truth[j].id) {
          mismatches++;
          break;
        }
    }
  }

  // ring over sorted 1-d coordinates: diameter n/2, still exact at full beam
  {
    VectorDataset raw = gen_gaussian_mixture(31, 2100, 1, 6);
    std::vector<float> coords;
    for (uint32_t i = 0; i < 2000; i++) coords.push_back(*testutil::row_f32(raw, i));
    std::sort(coords.begin(), coords.end());
    auto ds = testutil::make_f32(coords, 2000, 1);
    NeighborGraph g(2000, 2);
    for (uint32_t v = 0; v < 2000; v++) {
      g.set_neighbors(v, std::vector<uint32_t>{v == 0 ? 1999u : v - 1, v == 1999 ? 0u : v + 1});
    }
    g.set_start(1000);
    DistanceCounter c;
    for (uint32_t qi = 0; qi < 100; qi++) {
      float qv = *testutil::row_f32(raw, 2000 + qi);
      std::vector<float> qflat = {qv};
      auto qds = testutil::make_f32(qflat, 1, 1);
      auto truth = testutil::oracle_knn(ds, testutil::row_f32(qds, 0), 10);
      SearchResult r =
          beam_search(g, ds, Metric::l2_squared, qds.row(0), SearchParams{2000, 10, 0.0f}, &c);
      if (r.neighbors.size() != 10) mismatches++;
      for (size_t j = 0; j < r.neighbors.size(); j++)
        if (r.neighbors[j].id != truth[j].id) {
          mismatches++;
          break;
        }
    }
  }

  report(2, mismatches == 0,
         fmt("full-beam search is exact on complete and ring graphs (%d mismatches in 200 "
             "queries)",
             mismatches));
}

// results reused by criterion 4
SweepPoint g_best[4];

void criterion_3(const Desk& d) {
  const char* names[4] = {"diskann", "hnsw", "hcnng", "pynndescent"};
  const double floors[4] = {0.95, 0.90, 0.90, 0.90};
  Dispatch searches[4] = {flat_dispatch(d.diskann, d), layered_dispatch(d.hnsw, d),
                          flat_dispatch(d.hcnng, d), flat_dispatch(d.pynnd.graph, d)};

  bool ok = true;
  std::string note;
  for (int a = 0; a < 4; a++) {
    g_best[a] = best_qualifying(searches[a], d, floors[a]);
    bool hit = g_best[a].recall >= floors[a];
    bool quick = d.secs[a] < 60.0;
    ok = ok && hit && quick;
    note += fmt("%s%s %.4f@beam%u/%.1fs", a ? ", " : "", names[a],
                g_best[a].recall < 0 ? probe(searches[a], d, 200, 0.25f).recall
                                     : g_best[a].recall,
                g_best[a].beam, d.secs[a]);
  }
  report(3, ok, "desk recall floors 0.95/0.90/0.90/0.90 at 10@10: " + note);
}

void criterion_4(const Desk& d) {
  const char* names[4] = {"diskann", "hnsw", "hcnng", "pynndescent"};
  bool ok = true;
  std::string note;
  for (int a = 0; a < 4; a++) {
    double ratio = g_best[a].recall < 0 ? 1.0 : g_best[a].comps / d.base.size();
    ok = ok && g_best[a].recall >= 0 && ratio <= 0.5;
    note += fmt("%s%s %.3fn", a ? ", " : "", names[a], ratio);
  }
  report(4, ok, "comparisons per query at the qualifying points (cap 0.5n): " + note);
}

void criterion_5(const Desk& d) {
  double degs[3];
  for (int i = 0; i < 3; i++) {
    DiskannParams p = desk_diskann_params();
    p.alpha = 1.0f + 0.1f * i;
    degs[i] = build_diskann(d.base, Metric::l2_squared, p, 4).mean_degree();
  }
  bool ok = degs[0] <= degs[1] && degs[1] <= degs[2];
  report(5, ok,
         fmt("mean degree grows with the prune slack: %.2f <= %.2f <= %.2f", degs[0], degs[1],
             degs[2]));
}

void criterion_6(const Desk& d) {
  Dispatch search = flat_dispatch(d.diskann, d);
  double prev = -1.0;
  bool ok = true;
  std::string note;
  for (uint32_t beam : {10u, 20u, 50u, 100u}) {
    double r = probe(search, d, beam, 0.1f).recall;
    if (prev >= 0 && r < prev - 0.01) ok = false;
    note += fmt("%s%.4f", note.empty() ? "" : " -> ", r);
    prev = r;
  }
  report(6, ok, "recall nondecreasing in the beam (slack 0.01): " + note);
}

void criterion_7(const Desk& d4) {
  std::string why;
  bool ok = true;
  std::string note;

  Desk d1;
  d1.base = d4.base;  // cheap copy of the flat buffer, same data
  d1.queries = d4.queries;
  d1.truth = d4.truth;
  d1.diskann = build_diskann(d1.base, Metric::l2_squared, desk_diskann_params(), 1);
  d1.hnsw = build_hnsw(d1.base, Metric::l2_squared, desk_hnsw_params(), 1);
  d1.hcnng = build_hcnng(d1.base, Metric::l2_squared, desk_hcnng_params(), 1);
  d1.pynnd = build_pynndescent(d1.base, Metric::l2_squared, desk_pynnd_params(), 1);

  std::vector<const NeighborGraph*> flats = {&d1.diskann, &d4.diskann, &d1.hcnng,
                                             &d4.hcnng, &d1.pynnd.graph, &d4.pynnd.graph};
  for (const NeighborGraph* g : flats) {
    try {
      check_graph_invariants(*g);
    } catch (const std::exception& e) {
      ok = false;
      note += fmt("flat invariants: %s; ", e.what());
    }
  }
  std::vector<const HnswIndex*> layered = {&d1.hnsw, &d4.hnsw};
  for (const HnswIndex* h : layered) {
    if (!hnsw_invariants(*h, why)) {
      ok = false;
      note += "hnsw: " + why + "; ";
    }
  }
  for (size_t workers : {size_t{1}, size_t{4}}) {
    if (!hcnng_tree_invariants(d4.base, workers, why)) {
      ok = false;
      note += "hcnng trees: " + why + "; ";
    }
    if (!pynnd_round_monotonic(d4.base, workers, why)) {
      ok = false;
      note += "descent rounds: " + why + "; ";
    }
  }

  const char* names[4] = {"diskann", "hnsw", "hcnng", "pynnd"};
  double r1[4] = {recall_at(flat_dispatch(d1.diskann, d1), d1),
                  recall_at(layered_dispatch(d1.hnsw, d1), d1),
                  recall_at(flat_dispatch(d1.hcnng, d1), d1),
                  recall_at(flat_dispatch(d1.pynnd.graph, d1), d1)};
  double r4[4] = {recall_at(flat_dispatch(d4.diskann, d4), d4),
                  recall_at(layered_dispatch(d4.hnsw, d4), d4),
                  recall_at(flat_dispatch(d4.hcnng, d4), d4),
                  recall_at(flat_dispatch(d4.pynnd.graph, d4), d4)};
  for (int a = 0; a < 4; a++) {
    double diff = std::abs(r1[a] - r4[a]);
    if (diff > 0.02) {
      ok = false;
      note += fmt("%s recall drifts %.4f; ", names[a], diff);
    }
  }
  if (note.empty()) note = "invariants hold for 1 and 4 workers, recall drift 0";
  report(7, ok, note);
}

void criterion_8() {
  auto ranges = batch_ranges(10);
  std::vector<std::pair<uint32_t, uint32_t>> want = {{1, 2}, {2, 4}, {4, 8}, {8, 10}};
  bool ok = ranges.size() == want.size();
  for (size_t i = 0; ok && i < want.size(); i++) ok = ranges[i] == want[i];
  report(8, ok, "doubling batches for n=10 are [1,2) [2,4) [4,8) [8,10)");
}

void criterion_9(const Desk& d) {
  HnswParams p = desk_hnsw_params();
  p.single_layer = true;
  HnswIndex flat = build_hnsw(d.base, Metric::l2_squared, p, 4);

  int mismatches = 0;
  DistanceCounter c;
  for (uint32_t qi = 0; qi < d.queries.size(); qi++) {
    SearchParams params{64, 10, 0.1f};
    SearchResult a = search_hnsw(flat, d.base, Metric::l2_squared, d.queries.row(qi), params);
    SearchResult b =
        beam_search(flat.layer(0), d.base, Metric::l2_squared, d.queries.row(qi), params, &c);
    bool same = a.dist_comps == b.dist_comps && a.neighbors.size() == b.neighbors.size() &&
                a.visited.size() == b.visited.size();
    for (size_t j = 0; same && j < a.neighbors.size(); j++)
      same = a.neighbors[j].id == b.neighbors[j].id && a.neighbors[j].dist == b.neighbors[j].dist;
    for (size_t j = 0; same && j < a.visited.size(); j++)
      same = a.visited[j].id == b.visited[j].id;
    if (!same) mismatches++;
  }
  report(9, mismatches == 0,
         fmt("flattened layered search equals plain search (%d of 1000 queries differ)",
             mismatches));
}

void criterion_10() {
  std::string why;
  bool ok = true;
  for (uint64_t seed = 0; seed < 100 && ok; seed++) {
    std::mt19937_64 rng(seed * 2654435761u + 17);
    uint32_t key_space;
    switch (seed % 3) {
      case 0: key_space = 1000; break;            // fat groups
      case 1: key_space = 1u << 20; break;        // mostly singletons
      default: key_space = 1u << (4 + seed % 14); // in between
    }
    std::vector<std::pair<uint32_t, uint32_t>> pairs(100000);
    for (auto& pr : pairs) pr = {static_cast<uint32_t>(rng() % key_space),
                                 static_cast<uint32_t>(rng())};

    GroupedPairs got = group_by_key(pairs, 4);

    // oracle: stable sort by key keeps input order within groups
    auto sorted = pairs;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::map<uint32_t, std::vector<uint32_t>> by_key;
    for (const auto& pr : sorted) by_key[pr.first].push_back(pr.second);

    if (got.pairs.size() != pairs.size()) {
      ok = false;
      why = "pair count changed";
      break;
    }
    std::set<uint32_t> seen_keys;
    for (size_t gi = 0; gi < got.groups(); gi++) {
      size_t lo = got.group_offsets[gi], hi = got.group_offsets[gi + 1];
      uint32_t key = got.pairs[lo].first;
      if (!seen_keys.insert(key).second) {
        ok = false;
        why = "key split across groups";
        break;
      }
      auto it = by_key.find(key);
      if (it == by_key.end() || it->second.size() != hi - lo) {
        ok = false;
        why = "group size disagrees with the oracle";
        break;
      }
      for (size_t j = lo; j < hi; j++) {
        if (got.pairs[j].first != key || got.pairs[j].second != it->second[j - lo]) {
          ok = false;
          why = "group content or order disagrees";
          break;
        }
      }
      if (!ok) break;
    }
    if (ok && seen_keys.size() != by_key.size()) {
      ok = false;
      why = "group count disagrees";
    }
  }
  report(10, ok, ok ? "grouping matches the sort oracle on 100 seeds x 100k pairs" : why);
}

void criterion_11(const Desk& d) {
  // calibrate the radius until the mean truth size sits near ten
  float lo = 0.5f, hi = 8.0f, r = 0.0f;
  RangeGroundTruth gt;
  double mean = 0.0;
  for (int iter = 0; iter < 24; iter++) {
    r = 0.5f * (lo + hi);
    gt = compute_range_groundtruth(d.base, d.queries, r, Metric::l2_squared, 4);
    mean = static_cast<double>(gt.ids.size()) / d.queries.size();
    if (mean < 8.0)
      lo = r;
    else if (mean > 12.0)
      hi = r;
    else
      break;
  }

  const char* names[4] = {"diskann", "hnsw", "hcnng", "pynnd"};
  const NeighborGraph* graphs[4] = {&d.diskann, &d.hnsw.layer(0), &d.hcnng, &d.pynnd.graph};
  bool ok = mean >= 8.0 && mean <= 12.0;
  std::string note = fmt("radius %.3f gives mean truth %.2f; ", r, mean);
  for (int a = 0; a < 4; a++) {
    double best = 0.0;
    for (uint32_t beam : {100u, 200u, 500u}) {
      std::vector<std::vector<uint32_t>> results(d.queries.size());
      DistanceCounter c;
      for (uint32_t qi = 0; qi < d.queries.size(); qi++) {
        RangeResult rr = range_search(*graphs[a], d.base, Metric::l2_squared, d.queries.row(qi),
                                      r, SearchParams{beam, beam, 0.25f}, &c);
        for (const Neighbor& nb : rr.in_range) results[qi].push_back(nb.id);
      }
      best = std::max(best, range_recall(gt, results).value_or(0.0));
      if (best >= 0.90) break;
    }
    ok = ok && best >= 0.90;
    note += fmt("%s%s %.4f", a ? ", " : "", names[a], best);
  }
  report(11, ok, "range recall floors 0.90 at beam <= 500: " + note);
}

void criterion_12(const Desk& d) {
  std::atomic<uint64_t> shadow{0};
  set_distance_shadow(&shadow);
  uint64_t discrepancies = 0;
  for (uint32_t qi = 0; qi < d.queries.size(); qi++) {
    uint64_t before = shadow.load();
    DistanceCounter c;
    SearchResult r = beam_search(d.diskann, d.base, Metric::l2_squared, d.queries.row(qi),
                                 SearchParams{50, 10, 0.1f}, &c);
    uint64_t seen = shadow.load() - before;
    if (seen != r.dist_comps) discrepancies++;
  }
  set_distance_shadow(nullptr);
  report(12, discrepancies == 0,
         fmt("reported comparisons equal the shadow tally (%llu of 1000 queries off)",
             static_cast<unsigned long long>(discrepancies)));
}

}  // namespace

int main() {
  std::printf("acceptance checks, desk scale\n");
  criterion_1();
  criterion_2();

  Desk desk = make_desk(4);
  criterion_3(desk);
  criterion_4(desk);
  criterion_5(desk);
  criterion_6(desk);
  criterion_7(desk);
  criterion_8();
  criterion_9(desk);
  criterion_10();
  criterion_11(desk);
  criterion_12(desk);

  std::printf("%d of 12 criteria passed\n", 12 - g_failures);
  return g_failures;
}
