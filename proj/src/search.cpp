#include "graphann/search.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace graphann {

ApproxVisitedSet::ApproxVisitedSet(uint32_t beam, uint64_t seed)
    : slots_(static_cast<size_t>(beam) * beam, std::numeric_limits<uint32_t>::max()),
      seed_(seed) {
  if (beam == 0) throw std::invalid_argument("beam must be positive");
}

namespace {

constexpr float kInf = std::numeric_limits<float>::infinity();

struct BeamEntry {
  float dist;
  uint32_t id;
  bool expanded;
};

inline bool entry_less(const BeamEntry& a, const BeamEntry& b) {
  return a.dist < b.dist || (a.dist == b.dist && a.id < b.id);
}

void validate_search_args(const NeighborGraph& g, const VectorDataset& ds,
                          const VectorView& q, const SearchParams& p) {
  if (p.beam == 0 || p.k == 0) throw std::invalid_argument("beam and k must be positive");
  if (p.k > p.beam) {
    throw std::invalid_argument("k=" + std::to_string(p.k) + " exceeds beam=" +
                                std::to_string(p.beam));
  }
  if (!(p.epsilon >= 0.0f && p.epsilon <= 0.25f)) {
    throw std::invalid_argument("epsilon must lie in [0, 0.25]");
  }
  if (g.size() > ds.size()) {
    throw std::invalid_argument("graph has more vertices than the dataset");
  }
  if (q.dim != ds.dim() || q.elem != ds.elem()) {
    throw std::invalid_argument("query does not match dataset dimension/element kind");
  }
}

// Deterministic per-query seed so collision patterns vary across queries but
// repeated runs of the same query are identical.
uint64_t search_seed(const VectorView& q, uint32_t start) {
  uint64_t h = mix64(start, q.dim);
  size_t take = std::min<size_t>(16, static_cast<size_t>(q.dim) * elem_size(q.elem));
  uint64_t buf[2] = {0, 0};
  std::memcpy(buf, q.data, take);
  return mix64(h ^ buf[0], buf[1]);
}

}  // namespace

SearchResult beam_search(const NeighborGraph& g, const VectorDataset& ds, Metric metric,
                         const VectorView& q, const SearchParams& params,
                         DistanceCounter* counter, std::optional<uint32_t> start_override) {
  validate_search_args(g, ds, q, params);
  SearchResult result;
  if (g.size() == 0) return result;

  const uint32_t start = start_override.value_or(g.start());
  if (start >= g.size()) throw std::invalid_argument("start vertex out of range");

  BoundMetric bm(metric, ds.elem(), ds.dim());
  DistanceCounter local;
  const uint32_t L = params.beam;

  std::vector<BeamEntry> beam;
  beam.reserve(L + 1);
  ApproxVisitedSet seen(L, search_seed(q, start));
  std::unordered_set<uint32_t> expanded;

  // Sorted insert; duplicates of an existing (dist, id) entry are dropped,
  // and anything past the L-th position falls off.
  auto push = [&](uint32_t id, float dist) {
    BeamEntry e{dist, id, false};
    auto it = std::lower_bound(beam.begin(), beam.end(), e, entry_less);
    if (it != beam.end() && it->id == id && it->dist == dist) return;
    if (beam.size() >= L && it == beam.end()) return;
    beam.insert(it, e);
    if (beam.size() > L) beam.pop_back();
  };

  push(start, bm(q.data, ds.row_ptr(start), local));
  seen.insert(start);

  while (true) {
    size_t next = beam.size();
    for (size_t i = 0; i < beam.size(); i++) {
      if (!beam[i].expanded) {
        next = i;
        break;
      }
    }
    if (next == beam.size()) break;

    float best_k = beam.size() >= params.k ? beam[params.k - 1].dist : kInf;
    float limit = best_k == kInf ? kInf : best_k + params.epsilon * std::fabs(best_k);
    if (beam[next].dist > limit) break;

    BeamEntry& cur = beam[next];
    cur.expanded = true;
    // A beam eviction can erase the hash-table memory of an id, letting it be
    // re-inserted later; the exact set keeps such a revisit out of V.
    if (!expanded.insert(cur.id).second) continue;
    result.visited.push_back({cur.id, cur.dist});

    uint32_t cur_id = cur.id;
    for (uint32_t nb : g.out_neighbors(cur_id)) {
      if (seen.contains(nb)) continue;
      seen.insert(nb);
      push(nb, bm(q.data, ds.row_ptr(nb), local));
    }
  }

  result.neighbors = result.visited;
  std::sort(result.neighbors.begin(), result.neighbors.end(), neighbor_less);
  if (result.neighbors.size() > params.k) result.neighbors.resize(params.k);

  result.dist_comps = local.count;
  if (counter != nullptr) counter->count += local.count;
  return result;
}

RangeResult range_search(const NeighborGraph& g, const VectorDataset& ds, Metric metric,
                         const VectorView& q, float r, const SearchParams& params,
                         DistanceCounter* counter) {
  if (!(r > 0)) throw std::invalid_argument("range radius must be positive");
  SearchParams drained = params;
  drained.k = params.beam;
  SearchResult sr = beam_search(g, ds, metric, q, drained, counter);

  const float rr = internal_radius(metric, r);
  RangeResult out;
  out.dist_comps = sr.dist_comps;
  for (const auto& nb : sr.visited) {
    if (nb.dist <= rr) out.in_range.push_back(nb);
  }
  std::sort(out.in_range.begin(), out.in_range.end(), neighbor_less);
  return out;
}

}  // namespace graphann
