#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "graphann/dataset.hpp"
#include "graphann/graph.hpp"
#include "graphann/metric.hpp"
#include "graphann/prune.hpp"

namespace graphann {

struct PynndParams {
  uint32_t k = 40;            // degree bound
  uint32_t init_trees = 10;   // clustering trees seeding the initial graph
  uint32_t leaf_size = 100;
  float alpha = 1.2f;         // final prune slack
  PruneRule rule = PruneRule::scale_candidate;
  double delta = 0.001;       // stop once the changed-edge fraction drops here
  uint32_t round_cap = 30;
  uint32_t batch_count = 0;   // 0 = derive from mem_budget
  size_t mem_budget = size_t{1} << 30;  // candidate-buffer budget per round
  uint64_t seed = 42;
};

// Exact kNN inside the leaves of init_trees random cluster trees; per vertex
// the k nearest distinct candidates seen across trees are kept. Start vertex
// is left at 0; build_pynndescent sets it.
NeighborGraph init_knn_graph(const VectorDataset& ds, Metric metric, const PynndParams& params,
                             size_t workers, std::vector<DistanceCounter>& counters);

struct CappedAdjacency {
  std::vector<size_t> offsets;  // n+1 entries
  std::vector<uint32_t> ids;

  uint32_t size() const { return static_cast<uint32_t>(offsets.size() - 1); }
  std::span<const uint32_t> neighbors(uint32_t v) const {
    return {ids.data() + offsets[v], offsets[v + 1] - offsets[v]};
  }
};

// Out-edges plus a seeded uniform sample of in-edges (deduped against the
// out-list), at most 2k entries per vertex.
CappedAdjacency undirect_capped(const NeighborGraph& g, uint32_t k, uint64_t seed,
                                size_t workers);

struct DescentRound {
  NeighborGraph graph;
  double changed_fraction;  // |new edges - old edges| / total new edges
};

// One synchronous refinement pass: every vertex gathers its current
// out-neighbors plus the two-hop neighborhood over the capped undirected
// adjacency (both hops), and keeps the k closest distinct candidates. All
// reads see the round-start graph, so the batch partition never changes the
// result; `seed` feeds the undirection sampling.
DescentRound descent_round(const NeighborGraph& g, const VectorDataset& ds, Metric metric,
                           const PynndParams& params, uint64_t seed, size_t workers,
                           std::vector<DistanceCounter>& counters);

struct PynndBuildResult {
  NeighborGraph graph;
  uint32_t rounds = 0;
  bool converged = false;
  double last_change = 0.0;
};

// init, descent rounds until the changed fraction is at most delta (or the
// round cap is hit, flagged via converged=false), then a final alpha-prune of
// each vertex's list.
PynndBuildResult build_pynndescent(const VectorDataset& ds, Metric metric,
                                   const PynndParams& params, size_t workers = 0);

}  // namespace graphann
