#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graphann/dataset.hpp"
#include "graphann/graph.hpp"
#include "graphann/metric.hpp"
#include "graphann/prune.hpp"
#include "graphann/search.hpp"

namespace graphann {

struct HnswParams {
  uint32_t m = 32;                 // upper-layer degree bound; bottom gets 2m
  uint32_t ef_construction = 128;  // build beam
  float alpha = 1.2f;              // >1 keeps more under the adopted prune rule
  PruneRule rule = PruneRule::scale_candidate;
  uint64_t seed = 42;
  bool single_layer = false;  // force every level to 0 (flat build)
};

// Geometric level law: floor(-ln(u) / ln(m)) for u uniform in (0, 1], so a
// point reaches level >= l with probability m^-l.
uint32_t level_from_uniform(double u, uint32_t m);
uint32_t assign_level(uint64_t seed, uint32_t id, uint32_t m);

// Nested layer graphs over the full id space; a vertex belongs to layer l iff
// level[v] >= l. layer(0) is the bottom and contains everyone. The entry
// vertex is the one with the highest level, ties toward the smaller id.
class HnswIndex {
 public:
  HnswIndex() = default;

  uint32_t size() const { return static_cast<uint32_t>(levels_.size()); }
  uint32_t m() const { return m_; }
  uint32_t entry() const { return entry_; }
  uint32_t max_level() const { return static_cast<uint32_t>(layers_.size() - 1); }
  uint32_t num_layers() const { return static_cast<uint32_t>(layers_.size()); }
  uint32_t level(uint32_t v) const { return levels_[v]; }
  const std::vector<uint32_t>& levels() const { return levels_; }
  const NeighborGraph& layer(uint32_t l) const { return layers_[l]; }

 private:
  friend HnswIndex build_hnsw(const VectorDataset&, Metric, const HnswParams&, size_t);
  friend HnswIndex load_hnsw(const std::string&);

  uint32_t m_ = 0;
  uint32_t entry_ = 0;
  std::vector<uint32_t> levels_;
  std::vector<NeighborGraph> layers_;  // index == level, 0 is the bottom
};

// Layers are built top to bottom, each with the same doubling-batch insertion
// scheme as the flat builder, restricted to that layer's members and pruned
// to m (2m at the bottom). Deterministic for any worker count.
HnswIndex build_hnsw(const VectorDataset& ds, Metric metric, const HnswParams& params,
                     size_t workers = 0);

// Greedy single-entry descent through the upper layers, then a full beam
// search on the bottom layer seeded at the descent's endpoint. dist_comps
// accumulates across all layers.
SearchResult search_hnsw(const HnswIndex& index, const VectorDataset& ds, Metric metric,
                         const VectorView& q, const SearchParams& params,
                         DistanceCounter* counter = nullptr);

// Layout: magic "ANNH", u32 version, u32 n, u32 m, u32 entry, u32 layer
// count, u32 levels[n], then each layer bottom-up in graph file format.
void save_hnsw(const HnswIndex& index, const std::string& path);
HnswIndex load_hnsw(const std::string& path);

}  // namespace graphann
