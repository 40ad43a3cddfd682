#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "graphann/dataset.hpp"
#include "graphann/graph.hpp"
#include "graphann/metric.hpp"
#include "graphann/prune.hpp"

namespace graphann {

struct DiskannParams {
  uint32_t degree_bound = 64;  // R
  uint32_t build_beam = 128;   // L
  float alpha = 1.2f;
  PruneRule rule = PruneRule::scale_candidate;
  uint64_t seed = 42;
};

// One incremental insertion: beam-searches the current graph for j's vector,
// alpha-prunes the visited set into j's out-list, and returns the reverse
// (target, j) pairs the caller still has to apply. The counter sees both the
// search and the prune evaluations.
std::vector<std::pair<uint32_t, uint32_t>> insert_point(NeighborGraph& g,
                                                        const VectorDataset& ds, Metric metric,
                                                        uint32_t j, const DiskannParams& params,
                                                        DistanceCounter& counter);

// Incremental graph build over a shuffled insertion order in doubling batches.
// Batch vertices are searched and written in parallel (they are unreachable
// until their reverse edges land, so everyone reads the previous batch's
// graph), then the reverse edges are grouped by target and applied with one
// task per target. The result is identical for any worker count.
NeighborGraph build_diskann(const VectorDataset& ds, Metric metric,
                            const DiskannParams& params, size_t workers = 0);

}  // namespace graphann
