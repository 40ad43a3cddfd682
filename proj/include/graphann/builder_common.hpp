#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "graphann/dataset.hpp"
#include "graphann/graph.hpp"
#include "graphann/metric.hpp"
#include "graphann/prune.hpp"

namespace graphann {

// Doubling batch cuts over insertion positions: [1,2), [2,4), ... clipped
// to n. Position 0 is the start vertex and is never inserted by search.
std::vector<std::pair<uint32_t, uint32_t>> batch_ranges(uint32_t n);

// The point closest to the dataset centroid (accumulated in f32), ties toward
// the smaller id. Shared start heuristic for all the flat builders.
uint32_t choose_start(const VectorDataset& ds, Metric metric, size_t workers = 0);

// Fisher-Yates permutation of [0, n) with the given vertex swapped to front.
std::vector<uint32_t> shuffled_order(uint32_t n, uint64_t seed, uint32_t front);

// Applies reverse edges in batch: `edges` holds (target, new neighbor) pairs,
// possibly many per target. Each target is handled by exactly one task: the
// new ids are appended to its list (first occurrence wins on duplicates) and
// the result is alpha-pruned whenever it would exceed the degree bound.
// Distances for pruning are recomputed against the target.
void apply_back_edges(NeighborGraph& g, const VectorDataset& ds, Metric metric,
                      std::span<const std::pair<uint32_t, uint32_t>> edges,
                      const PruneParams& prune, size_t workers,
                      std::vector<DistanceCounter>& worker_counters);

}  // namespace graphann
