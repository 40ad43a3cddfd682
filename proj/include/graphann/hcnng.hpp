#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "graphann/dataset.hpp"
#include "graphann/graph.hpp"
#include "graphann/metric.hpp"

namespace graphann {

struct HcnngParams {
  uint32_t trees = 30;       // clustering rounds merged into the final graph
  uint32_t leaf_size = 1000; // recursion stops at subsets of at most this size
  uint32_t mst_degree = 3;   // per-tree degree cap inside each leaf MST
  uint32_t knn_per_leaf = 0; // candidate edges per point; 0 = max(10, 3*mst_degree)
  uint64_t seed = 42;
};

// Random two-pivot partition, recursed until every piece fits the leaf bound.
// Points tied between pivots go to the first; a split that leaves one side
// empty (all points identical) falls back to an equal cut by position so the
// recursion always terminates. Every input id lands in exactly one leaf.
std::vector<std::vector<uint32_t>> cluster_leaves(const VectorDataset& ds, Metric metric,
                                                  std::vector<uint32_t> subset,
                                                  uint32_t leaf_size, uint64_t seed,
                                                  size_t workers,
                                                  std::vector<DistanceCounter>& counters);

struct MstEdge {
  uint32_t u, v;  // global ids, u < v
  float w;
};

// Degree-bounded Kruskal over the leaf's candidate edges: each point
// contributes edges to its knn nearest leaf-mates; edges are scanned in
// (weight, min id, max id) order and accepted only when they join two
// components and neither endpoint has reached mst_degree. The result spans
// the candidate graph where the cap allows and is a forest otherwise.
std::vector<MstEdge> leaf_mst(const VectorDataset& ds, Metric metric,
                              std::span<const uint32_t> leaf, uint32_t mst_degree,
                              uint32_t knn, DistanceCounter& counter);

// Union of per-tree MSTs: trees run one after another (leaves in parallel),
// each tree's edges are added in both directions and merged into the graph
// with first-come dedupe. Capacity trees*mst_degree; a vertex never exceeds
// it because one tree adds at most mst_degree edges at a vertex.
NeighborGraph build_hcnng(const VectorDataset& ds, Metric metric, const HcnngParams& params,
                          size_t workers = 0);

}  // namespace graphann
