#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace graphann {

// Pairs rearranged so equal keys sit contiguously; group_offsets delimits the
// groups (group i spans [group_offsets[i], group_offsets[i+1])). Groups land
// in key-hash bucket order, not key order. Within a group the original input
// order is preserved, and the result is identical for any worker count.
struct GroupedPairs {
  std::vector<std::pair<uint32_t, uint32_t>> pairs;
  std::vector<size_t> group_offsets;

  size_t groups() const { return group_offsets.empty() ? 0 : group_offsets.size() - 1; }
};

GroupedPairs group_by_key(std::span<const std::pair<uint32_t, uint32_t>> pairs,
                          size_t workers);

}  // namespace graphann
