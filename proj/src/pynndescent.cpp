#include "graphann/pynndescent.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "graphann/builder_common.hpp"
#include "graphann/core.hpp"
#include "graphann/hcnng.hpp"
#include "graphann/parallel.hpp"
#include "graphann/semisort.hpp"

namespace graphann {

namespace {

// Merge sorted-by-(dist,id) incumbents with fresh candidates, keep k distinct.
void merge_best(std::vector<Neighbor>& best, std::vector<Neighbor>& fresh, uint32_t k) {
  std::sort(fresh.begin(), fresh.end(), neighbor_less);
  std::vector<Neighbor> merged;
  merged.reserve(best.size() + fresh.size());
  std::merge(best.begin(), best.end(), fresh.begin(), fresh.end(), std::back_inserter(merged),
             neighbor_less);
  best.clear();
  std::vector<uint32_t> seen;
  for (const Neighbor& nb : merged) {
    if (best.size() == k) break;
    if (std::find(seen.begin(), seen.end(), nb.id) != seen.end()) continue;
    seen.push_back(nb.id);
    best.push_back(nb);
  }
}

}  // namespace

NeighborGraph init_knn_graph(const VectorDataset& ds, Metric metric, const PynndParams& params,
                             size_t workers, std::vector<DistanceCounter>& counters) {
  const uint32_t n = ds.size();
  if (n < 2) throw std::invalid_argument("descent needs at least two points");
  if (params.k == 0 || params.init_trees == 0 || params.leaf_size == 0) {
    throw std::invalid_argument("k, init_trees and leaf_size must be positive");
  }

  BoundMetric dist(metric, ds.elem(), ds.dim());
  std::vector<std::vector<Neighbor>> best(n);

  std::vector<uint32_t> everyone(n);
  std::iota(everyone.begin(), everyone.end(), 0u);

  for (uint32_t t = 0; t < params.init_trees; ++t) {
    uint64_t tree_seed = mix64(params.seed, 0x696e6974ULL, t);
    std::vector<std::vector<uint32_t>> leaves =
        cluster_leaves(ds, metric, everyone, params.leaf_size, tree_seed, workers, counters);

    // Leaves partition the ids, so per-vertex writes are disjoint inside one
    // tree; trees run one after another.
    parallel_for(leaves.size(), workers, [&](size_t li, size_t worker) {
      const std::vector<uint32_t>& leaf = leaves[li];
      std::vector<Neighbor> fresh;
      for (size_t i = 0; i < leaf.size(); ++i) {
        fresh.clear();
        const std::byte* pi = ds.row_ptr(leaf[i]);
        for (size_t j = 0; j < leaf.size(); ++j) {
          if (j == i) continue;
          fresh.push_back({leaf[j], dist(pi, ds.row_ptr(leaf[j]), counters[worker])});
        }
        merge_best(best[leaf[i]], fresh, params.k);
      }
    });
  }

  NeighborGraph g(n, params.k);
  parallel_for(n, workers, [&](size_t v, size_t) {
    std::vector<uint32_t> ids;
    ids.reserve(best[v].size());
    for (const Neighbor& nb : best[v]) ids.push_back(nb.id);
    g.set_neighbors(static_cast<uint32_t>(v), ids);
  });
  return g;
}

CappedAdjacency undirect_capped(const NeighborGraph& g, uint32_t k, uint64_t seed,
                                size_t workers) {
  const uint32_t n = g.size();
  if (k == 0) throw std::invalid_argument("k must be positive");
  const size_t cap = size_t{2} * k;

  std::vector<std::vector<uint32_t>> lists(n);
  parallel_for(n, workers, [&](size_t v, size_t) {
    auto out = g.out_neighbors(static_cast<uint32_t>(v));
    if (out.size() > k) throw std::invalid_argument("graph degree exceeds k");
    lists[v].assign(out.begin(), out.end());
  });

  std::vector<std::pair<uint32_t, uint32_t>> reversed;
  reversed.reserve(g.total_edges());
  for (uint32_t v = 0; v < n; ++v) {
    for (uint32_t u : g.out_neighbors(v)) reversed.emplace_back(u, v);
  }

  GroupedPairs grouped = group_by_key(reversed, workers);
  parallel_for(grouped.groups(), workers, [&](size_t gi, size_t) {
    size_t lo = grouped.group_offsets[gi], hi = grouped.group_offsets[gi + 1];
    uint32_t v = grouped.pairs[lo].first;
    std::vector<uint32_t>& mine = lists[v];

    std::vector<uint32_t> incoming;
    incoming.reserve(hi - lo);
    for (size_t e = lo; e < hi; ++e) {
      uint32_t src = grouped.pairs[e].second;
      if (std::find(mine.begin(), mine.end(), src) == mine.end()) incoming.push_back(src);
    }

    size_t room = cap - mine.size();
    if (incoming.size() <= room) {
      mine.insert(mine.end(), incoming.begin(), incoming.end());
    } else {
      std::mt19937_64 rng(mix64(seed, v));
      std::sample(incoming.begin(), incoming.end(), std::back_inserter(mine), room, rng);
    }
  });

  CappedAdjacency adj;
  adj.offsets.resize(n + 1, 0);
  for (uint32_t v = 0; v < n; ++v) adj.offsets[v + 1] = adj.offsets[v] + lists[v].size();
  adj.ids.resize(adj.offsets[n]);
  parallel_for(n, workers, [&](size_t v, size_t) {
    std::copy(lists[v].begin(), lists[v].end(), adj.ids.begin() + adj.offsets[v]);
  });
  return adj;
}

DescentRound descent_round(const NeighborGraph& g, const VectorDataset& ds, Metric metric,
                           const PynndParams& params, uint64_t seed, size_t workers,
                           std::vector<DistanceCounter>& counters) {
  const uint32_t n = g.size();
  BoundMetric dist(metric, ds.elem(), ds.dim());
  CappedAdjacency und = undirect_capped(g, params.k, seed, workers);

  NeighborGraph next(n, params.k);
  next.set_start(g.start());
  std::vector<uint32_t> changed(n, 0);

  // Candidate buffers peak near 4k^2 entries per in-flight vertex; the batch
  // partition bounds that footprint and nothing else, since every read below
  // is against the round-start graph or the adjacency snapshot.
  uint32_t batches = params.batch_count;
  if (batches == 0) {
    size_t per_vertex = sizeof(Neighbor) * (size_t{4} * params.k * params.k + params.k);
    size_t per_batch = std::max<size_t>(1, params.mem_budget / per_vertex);
    batches = static_cast<uint32_t>((n + per_batch - 1) / per_batch);
  }
  batches = std::min(batches, n);
  const uint32_t chunk = (n + batches - 1) / batches;

  for (uint32_t lo = 0; lo < n; lo += chunk) {
    const uint32_t hi = std::min(n, lo + chunk);
    parallel_for(hi - lo, workers, [&](size_t b, size_t worker) {
      const uint32_t p = lo + static_cast<uint32_t>(b);
      std::vector<uint32_t> cand_ids;
      auto out = g.out_neighbors(p);
      cand_ids.assign(out.begin(), out.end());
      // The whole two-hop neighborhood: direct undirected neighbors (which
      // adds the sampled reverse edges) plus their undirected neighbors.
      for (uint32_t u : und.neighbors(p)) {
        cand_ids.push_back(u);
        auto hop = und.neighbors(u);
        cand_ids.insert(cand_ids.end(), hop.begin(), hop.end());
      }
      std::sort(cand_ids.begin(), cand_ids.end());
      cand_ids.erase(std::unique(cand_ids.begin(), cand_ids.end()), cand_ids.end());

      std::vector<Neighbor> cand;
      cand.reserve(cand_ids.size());
      const std::byte* pp = ds.row_ptr(p);
      for (uint32_t c : cand_ids) {
        if (c == p) continue;
        cand.push_back({c, dist(pp, ds.row_ptr(c), counters[worker])});
      }
      std::sort(cand.begin(), cand.end(), neighbor_less);
      if (cand.size() > params.k) cand.resize(params.k);

      std::vector<uint32_t> ids;
      ids.reserve(cand.size());
      uint32_t moved = 0;
      for (const Neighbor& nb : cand) {
        ids.push_back(nb.id);
        if (std::find(out.begin(), out.end(), nb.id) == out.end()) ++moved;
      }
      changed[p] = moved;
      next.set_neighbors(p, ids);
    });
  }

  uint64_t moved_total = std::accumulate(changed.begin(), changed.end(), uint64_t{0});
  uint64_t edges = next.total_edges();
  double fraction = edges == 0 ? 0.0 : static_cast<double>(moved_total) / edges;
  return {std::move(next), fraction};
}

PynndBuildResult build_pynndescent(const VectorDataset& ds, Metric metric,
                                   const PynndParams& params, size_t workers) {
  const uint32_t n = ds.size();
  if (n < 2) throw std::invalid_argument("descent needs at least two points");
  if (params.delta < 0.0 || params.delta > 1.0) {
    throw std::invalid_argument("delta must lie in [0, 1]");
  }
  if (params.round_cap == 0) throw std::invalid_argument("round cap must be positive");

  size_t w = resolve_workers(workers);
  std::vector<DistanceCounter> counters(w);

  PynndBuildResult result;
  result.graph = init_knn_graph(ds, metric, params, workers, counters);
  result.graph.set_start(choose_start(ds, metric, workers));

  while (result.rounds < params.round_cap) {
    uint64_t round_seed = mix64(params.seed, 0x726f756e64ULL, result.rounds);
    DescentRound round =
        descent_round(result.graph, ds, metric, params, round_seed, workers, counters);
    result.graph = std::move(round.graph);
    result.rounds += 1;
    result.last_change = round.changed_fraction;
    if (round.changed_fraction <= params.delta) {
      result.converged = true;
      break;
    }
  }

  // Final prune; reads only the dataset and each vertex's own list, so the
  // in-place rewrite is safe.
  BoundMetric dist(metric, ds.elem(), ds.dim());
  PruneParams pp{params.k, params.alpha, params.rule};
  NeighborGraph& g = result.graph;
  parallel_for(n, workers, [&](size_t v, size_t worker) {
    const uint32_t p = static_cast<uint32_t>(v);
    auto out = g.out_neighbors(p);
    std::vector<Neighbor> cand;
    cand.reserve(out.size());
    const std::byte* pp_row = ds.row_ptr(p);
    for (uint32_t id : out) {
      cand.push_back({id, dist(pp_row, ds.row_ptr(id), counters[worker])});
    }
    std::vector<uint32_t> kept = alpha_prune(p, cand, pp, ds, metric, counters[worker]);
    g.set_neighbors(p, kept);
  });
  return result;
}

}  // namespace graphann
