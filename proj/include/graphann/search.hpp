#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "graphann/core.hpp"
#include "graphann/dataset.hpp"
#include "graphann/graph.hpp"
#include "graphann/metric.hpp"

namespace graphann {

struct SearchParams {
  uint32_t beam = 10;      // candidate list bound L
  uint32_t k = 10;         // results requested; also gates expansion, see below
  float epsilon = 0.0f;    // expansion slack in [0, 0.25]
};

// One slot per bucket, no chaining: a colliding insert simply overwrites, so
// membership can under-report (an evicted id is forgotten) but an id that was
// never inserted is never reported present. Sized beam*beam; the seed varies
// per search so collision patterns differ across queries.
class ApproxVisitedSet {
 public:
  ApproxVisitedSet(uint32_t beam, uint64_t seed);

  void insert(uint32_t id) { slots_[index_of(id)] = id; }
  bool contains(uint32_t id) const { return slots_[index_of(id)] == id; }
  size_t bucket_count() const { return slots_.size(); }

 private:
  size_t index_of(uint32_t id) const {
    return static_cast<size_t>(mix64(id ^ seed_) % slots_.size());
  }
  std::vector<uint32_t> slots_;
  uint64_t seed_;
};

struct SearchResult {
  std::vector<Neighbor> neighbors;  // k best of visited, ascending (dist, id)
  std::vector<Neighbor> visited;    // expanded vertices in expansion order
  uint64_t dist_comps = 0;
};

// Best-first beam traversal from the start vertex. The beam keeps the L
// closest discovered vertices; the closest unexpanded one is expanded next,
// but only while its distance is at most best_k + epsilon*|best_k| where
// best_k is the current k-th best distance (unbounded until k vertices are
// discovered). Ties break toward the smaller id everywhere. Exhausting the
// whole beam, as the plain algorithm does, is the k = beam special case;
// builders and range scans use that.
//
// `start_override` begins the walk somewhere other than g.start() (layered
// indexes descend this way). When `counter` is given the evaluations are
// added to it; the result's dist_comps always carries the per-search count.
SearchResult beam_search(const NeighborGraph& g, const VectorDataset& ds, Metric metric,
                         const VectorView& q, const SearchParams& params,
                         DistanceCounter* counter = nullptr,
                         std::optional<uint32_t> start_override = std::nullopt);

struct RangeResult {
  std::vector<Neighbor> in_range;  // ascending (dist, id)
  uint64_t dist_comps = 0;
};

// Beam traversal with the expansion gate widened to the whole beam (k plays
// no role in range mode), then every visited vertex within the radius is
// kept. `r` is in reported units: a plain Euclidean radius under l2, squared
// internally before comparison.
RangeResult range_search(const NeighborGraph& g, const VectorDataset& ds, Metric metric,
                         const VectorView& q, float r, const SearchParams& params,
                         DistanceCounter* counter = nullptr);

}  // namespace graphann
