#include "graphann/builder_common.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>

#include "graphann/parallel.hpp"
#include "graphann/semisort.hpp"

namespace graphann {

std::vector<std::pair<uint32_t, uint32_t>> batch_ranges(uint32_t n) {
  std::vector<std::pair<uint32_t, uint32_t>> ranges;
  for (uint64_t lo = 1; lo < n; lo <<= 1) {
    uint64_t hi = std::min<uint64_t>(lo << 1, n);
    ranges.emplace_back(static_cast<uint32_t>(lo), static_cast<uint32_t>(hi));
  }
  return ranges;
}

namespace {

// Distance from a raw point to an f32 centroid, widening integer elements.
template <typename T>
float dist_to_centroid(Metric metric, const std::byte* row, const float* centroid, uint32_t d) {
  const T* x = reinterpret_cast<const T*>(row);
  float acc = 0.0f;
  if (metric == Metric::l2_squared) {
    for (uint32_t i = 0; i < d; i++) {
      float diff = static_cast<float>(x[i]) - centroid[i];
      acc += diff * diff;
    }
    return acc;
  }
  for (uint32_t i = 0; i < d; i++) acc += static_cast<float>(x[i]) * centroid[i];
  return -acc;
}

float centroid_distance(Metric metric, ElemKind elem, const std::byte* row,
                        const float* centroid, uint32_t d) {
  switch (elem) {
    case ElemKind::u8: return dist_to_centroid<uint8_t>(metric, row, centroid, d);
    case ElemKind::i8: return dist_to_centroid<int8_t>(metric, row, centroid, d);
    case ElemKind::f32: return dist_to_centroid<float>(metric, row, centroid, d);
  }
  return 0.0f;
}

template <typename T>
void accumulate_row(const std::byte* row, double* acc, uint32_t d) {
  const T* x = reinterpret_cast<const T*>(row);
  for (uint32_t i = 0; i < d; i++) acc[i] += static_cast<double>(x[i]);
}

}  // namespace

uint32_t choose_start(const VectorDataset& ds, Metric metric, size_t workers) {
  const uint32_t n = ds.size();
  if (n == 0) throw std::invalid_argument("cannot pick a start point of an empty dataset");
  const uint32_t d = ds.dim();

  size_t w = resolve_workers(workers);
  std::vector<std::vector<double>> partial(w, std::vector<double>(d, 0.0));
  parallel_ranges(n, workers, [&](size_t lo, size_t hi, size_t worker) {
    double* acc = partial[worker].data();
    for (size_t i = lo; i < hi; i++) {
      switch (ds.elem()) {
        case ElemKind::u8: accumulate_row<uint8_t>(ds.row_ptr(i), acc, d); break;
        case ElemKind::i8: accumulate_row<int8_t>(ds.row_ptr(i), acc, d); break;
        case ElemKind::f32: accumulate_row<float>(ds.row_ptr(i), acc, d); break;
      }
    }
  });
  std::vector<float> centroid(d);
  for (uint32_t j = 0; j < d; j++) {
    double sum = 0.0;
    for (size_t t = 0; t < w; t++) sum += partial[t][j];
    centroid[j] = static_cast<float>(sum / n);
  }

  std::vector<Neighbor> best(w, Neighbor{0, std::numeric_limits<float>::infinity()});
  parallel_ranges(n, workers, [&](size_t lo, size_t hi, size_t worker) {
    Neighbor b = best[worker];
    for (size_t i = lo; i < hi; i++) {
      float dist = centroid_distance(metric, ds.elem(), ds.row_ptr(i), centroid.data(), d);
      Neighbor cand{static_cast<uint32_t>(i), dist};
      if (neighbor_less(cand, b)) b = cand;
    }
    best[worker] = b;
  });
  Neighbor overall = best[0];
  for (size_t t = 1; t < w; t++) {
    if (neighbor_less(best[t], overall)) overall = best[t];
  }
  return overall.id;
}

std::vector<uint32_t> shuffled_order(uint32_t n, uint64_t seed, uint32_t front) {
  std::vector<uint32_t> order(n);
  for (uint32_t i = 0; i < n; i++) order[i] = i;
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  auto it = std::find(order.begin(), order.end(), front);
  std::iter_swap(order.begin(), it);
  return order;
}

void apply_back_edges(NeighborGraph& g, const VectorDataset& ds, Metric metric,
                      std::span<const std::pair<uint32_t, uint32_t>> edges,
                      const PruneParams& prune, size_t workers,
                      std::vector<DistanceCounter>& worker_counters) {
  if (edges.empty()) return;
  GroupedPairs grouped = group_by_key(edges, workers);
  BoundMetric bm(metric, ds.elem(), ds.dim());

  parallel_for(grouped.groups(), workers, [&](size_t gi, size_t worker) {
    DistanceCounter& counter = worker_counters[worker];
    const size_t lo = grouped.group_offsets[gi];
    const size_t hi = grouped.group_offsets[gi + 1];
    const uint32_t target = grouped.pairs[lo].first;

    auto current = g.out_neighbors(target);
    std::vector<uint32_t> merged(current.begin(), current.end());
    for (size_t e = lo; e < hi; e++) {
      uint32_t nb = grouped.pairs[e].second;
      if (std::find(merged.begin(), merged.end(), nb) == merged.end()) merged.push_back(nb);
    }
    if (merged.size() <= prune.degree_bound) {
      g.set_neighbors(target, merged);
      return;
    }
    std::vector<Neighbor> cands;
    cands.reserve(merged.size());
    const std::byte* tp = ds.row_ptr(target);
    for (uint32_t id : merged) cands.push_back({id, bm(tp, ds.row_ptr(id), counter)});
    auto kept = alpha_prune(target, cands, prune, ds, metric, counter);
    g.set_neighbors(target, kept);
  });
}

}  // namespace graphann
