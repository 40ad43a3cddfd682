#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "graphann/core.hpp"
#include "graphann/dataset.hpp"
#include "graphann/metric.hpp"

namespace graphann {

// Which removal test the selected vertex p* applies to a remaining candidate v:
//   scale_candidate: drop v when alpha * d(p*, v) <= d(p, v). Raising alpha
//                    makes removal harder, so the kept set only grows.
//   scale_selected:  drop v when d(p*, v) < alpha * d(p, p*). Compatibility
//                    variant; raising alpha removes more.
enum class PruneRule : uint8_t { scale_candidate, scale_selected };

struct PruneParams {
  uint32_t degree_bound = 64;  // R
  float alpha = 1.2f;
  PruneRule rule = PruneRule::scale_candidate;
};

// Greedy diversified selection. Candidates carry their distance to p; they are
// taken closest-first (ties toward the smaller id), and each selection culls
// the remaining candidates it dominates. Candidates at distance exactly zero
// (duplicates of p) are always selected and never cull anyone. Returns at most
// degree_bound ids in selection order; p itself is skipped if present.
std::vector<uint32_t> alpha_prune(uint32_t p, std::span<const Neighbor> candidates,
                                  const PruneParams& params, const VectorDataset& ds,
                                  Metric metric, DistanceCounter& counter);

}  // namespace graphann
