#include "graphann/semisort.hpp"

#include <algorithm>
#include <atomic>
#include <bit>

#include "graphann/core.hpp"
#include "graphann/parallel.hpp"

namespace graphann {

// Scatter into key-hash buckets, then sort each bucket by (key, input index).
// Bucket fill order races, but the per-bucket sort restores input order among
// equal keys, so the output never depends on scheduling or worker count.
GroupedPairs group_by_key(std::span<const std::pair<uint32_t, uint32_t>> pairs,
                          size_t workers) {
  GroupedPairs out;
  const size_t m = pairs.size();
  if (m == 0) return out;

  const size_t nbuckets = std::bit_ceil(std::max<size_t>(1, m / 1024));
  const uint64_t bucket_mask = nbuckets - 1;

  std::vector<std::atomic<size_t>> counts(nbuckets);
  for (auto& c : counts) c.store(0, std::memory_order_relaxed);

  parallel_ranges(m, workers, [&](size_t lo, size_t hi, size_t) {
    for (size_t i = lo; i < hi; i++) {
      size_t b = mix64(pairs[i].first) & bucket_mask;
      counts[b].fetch_add(1, std::memory_order_relaxed);
    }
  });

  std::vector<size_t> bucket_start(nbuckets + 1, 0);
  for (size_t b = 0; b < nbuckets; b++) {
    bucket_start[b + 1] = bucket_start[b] + counts[b].load(std::memory_order_relaxed);
  }

  struct Tagged {
    uint32_t key;
    uint32_t value;
    size_t index;
  };
  std::vector<Tagged> scratch(m);
  std::vector<std::atomic<size_t>> cursor(nbuckets);
  for (size_t b = 0; b < nbuckets; b++) {
    cursor[b].store(bucket_start[b], std::memory_order_relaxed);
  }

  parallel_ranges(m, workers, [&](size_t lo, size_t hi, size_t) {
    for (size_t i = lo; i < hi; i++) {
      size_t b = mix64(pairs[i].first) & bucket_mask;
      size_t pos = cursor[b].fetch_add(1, std::memory_order_relaxed);
      scratch[pos] = {pairs[i].first, pairs[i].second, i};
    }
  });

  parallel_for(nbuckets, workers, [&](size_t b, size_t) {
    std::sort(scratch.begin() + bucket_start[b], scratch.begin() + bucket_start[b + 1],
              [](const Tagged& a, const Tagged& c) {
                return a.key < c.key || (a.key == c.key && a.index < c.index);
              });
  });

  out.pairs.resize(m);
  for (size_t i = 0; i < m; i++) out.pairs[i] = {scratch[i].key, scratch[i].value};
  out.group_offsets.push_back(0);
  for (size_t i = 1; i < m; i++) {
    if (out.pairs[i].first != out.pairs[i - 1].first) out.group_offsets.push_back(i);
  }
  out.group_offsets.push_back(m);
  return out;
}

}  // namespace graphann
