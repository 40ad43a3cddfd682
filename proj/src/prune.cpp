#include "graphann/prune.hpp"

#include <algorithm>
#include <stdexcept>

namespace graphann {

std::vector<uint32_t> alpha_prune(uint32_t p, std::span<const Neighbor> candidates,
                                  const PruneParams& params, const VectorDataset& ds,
                                  Metric metric, DistanceCounter& counter) {
  if (params.degree_bound == 0) throw std::invalid_argument("degree bound must be positive");
  if (!(params.alpha > 0.0f)) throw std::invalid_argument("alpha must be positive");

  std::vector<Neighbor> cand;
  cand.reserve(candidates.size());
  for (const auto& c : candidates) {
    if (c.id != p) cand.push_back(c);
  }
  std::sort(cand.begin(), cand.end(), neighbor_less);

  BoundMetric bm(metric, ds.elem(), ds.dim());
  std::vector<uint32_t> out;
  std::vector<bool> culled(cand.size(), false);

  for (size_t i = 0; i < cand.size() && out.size() < params.degree_bound; i++) {
    if (culled[i]) continue;
    const Neighbor sel = cand[i];
    out.push_back(sel.id);
    if (out.size() == params.degree_bound) break;
    // A duplicate of p would dominate everything; it joins the list but culls
    // nothing so distinct neighbors can still follow.
    if (sel.dist == 0.0f) continue;
    const std::byte* sel_ptr = ds.row_ptr(sel.id);
    for (size_t j = i + 1; j < cand.size(); j++) {
      if (culled[j]) continue;
      float via = bm(sel_ptr, ds.row_ptr(cand[j].id), counter);
      bool drop = params.rule == PruneRule::scale_candidate
                      ? params.alpha * via <= cand[j].dist
                      : via < params.alpha * sel.dist;
      if (drop) culled[j] = true;
    }
  }
  return out;
}

}  // namespace graphann
