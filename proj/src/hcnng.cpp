#include "graphann/hcnng.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "graphann/core.hpp"
#include "graphann/builder_common.hpp"
#include "graphann/parallel.hpp"
#include "graphann/semisort.hpp"

namespace graphann {

namespace {

struct SplitTask {
  std::vector<uint32_t> ids;
  uint64_t seed;
};

// Disjoint-set over leaf-local indices, path halving.
struct UnionFind {
  std::vector<uint32_t> parent;

  explicit UnionFind(size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  uint32_t find(uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(uint32_t a, uint32_t b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<std::vector<uint32_t>> cluster_leaves(const VectorDataset& ds, Metric metric,
                                                  std::vector<uint32_t> subset,
                                                  uint32_t leaf_size, uint64_t seed,
                                                  size_t workers,
                                                  std::vector<DistanceCounter>& counters) {
  if (subset.empty()) throw std::invalid_argument("cluster_leaves needs at least one id");
  if (leaf_size == 0) throw std::invalid_argument("leaf size must be positive");

  BoundMetric dist(metric, ds.elem(), ds.dim());
  std::vector<std::vector<uint32_t>> leaves;
  std::vector<SplitTask> frontier;
  frontier.push_back({std::move(subset), seed});

  while (!frontier.empty()) {
    std::vector<SplitTask> next;
    for (SplitTask& task : frontier) {
      const size_t m = task.ids.size();
      if (m <= leaf_size) {
        leaves.push_back(std::move(task.ids));
        continue;
      }

      std::mt19937_64 rng(task.seed);
      size_t p1 = rng() % m;
      size_t p2 = rng() % m;
      while (p2 == p1) p2 = rng() % m;
      const std::byte* a = ds.row_ptr(task.ids[p1]);
      const std::byte* b = ds.row_ptr(task.ids[p2]);

      // Ties go to the first pivot. The choice for each point is independent,
      // so the assignment pass parallelizes without affecting the outcome.
      std::vector<uint8_t> to_first(m);
      parallel_for(m, workers, [&](size_t i, size_t worker) {
        const std::byte* p = ds.row_ptr(task.ids[i]);
        float d1 = dist(p, a, counters[worker]);
        float d2 = dist(p, b, counters[worker]);
        to_first[i] = d1 <= d2 ? 1 : 0;
      });

      SplitTask left{{}, mix64(task.seed, 1)};
      SplitTask right{{}, mix64(task.seed, 2)};
      for (size_t i = 0; i < m; ++i) {
        (to_first[i] ? left.ids : right.ids).push_back(task.ids[i]);
      }
      if (left.ids.empty() || right.ids.empty()) {
        // Degenerate pivots (identical points). Cut by position instead.
        left.ids.assign(task.ids.begin(), task.ids.begin() + m / 2);
        right.ids.assign(task.ids.begin() + m / 2, task.ids.end());
      }
      next.push_back(std::move(left));
      next.push_back(std::move(right));
    }
    frontier = std::move(next);
  }
  return leaves;
}

std::vector<MstEdge> leaf_mst(const VectorDataset& ds, Metric metric,
                              std::span<const uint32_t> leaf, uint32_t mst_degree,
                              uint32_t knn, DistanceCounter& counter) {
  const size_t m = leaf.size();
  if (m == 0) throw std::invalid_argument("leaf_mst needs at least one id");
  if (mst_degree == 0 || knn == 0) {
    throw std::invalid_argument("degree cap and knn count must be positive");
  }
  if (m == 1) return {};

  BoundMetric dist(metric, ds.elem(), ds.dim());
  const uint32_t k = static_cast<uint32_t>(std::min<size_t>(knn, m - 1));

  // Candidate edges: each point to its k nearest leaf-mates, normalized to
  // u < v and deduped. Weights for the same pair are bitwise equal regardless
  // of direction, so exact dedupe is safe.
  std::vector<MstEdge> cand;
  cand.reserve(m * k);
  std::vector<Neighbor> near;
  for (size_t i = 0; i < m; ++i) {
    near.clear();
    const std::byte* pi = ds.row_ptr(leaf[i]);
    for (size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      float d = dist(pi, ds.row_ptr(leaf[j]), counter);
      Neighbor nb{static_cast<uint32_t>(j), d};
      if (near.size() < k) {
        near.push_back(nb);
        std::push_heap(near.begin(), near.end(), neighbor_less);
      } else if (neighbor_less(nb, near.front())) {
        std::pop_heap(near.begin(), near.end(), neighbor_less);
        near.back() = nb;
        std::push_heap(near.begin(), near.end(), neighbor_less);
      }
    }
    for (const Neighbor& nb : near) {
      uint32_t gu = leaf[i], gv = leaf[nb.id];
      cand.push_back({std::min(gu, gv), std::max(gu, gv), nb.dist});
    }
  }

  auto edge_less = [](const MstEdge& x, const MstEdge& y) {
    if (x.w != y.w) return x.w < y.w;
    if (x.u != y.u) return x.u < y.u;
    return x.v < y.v;
  };
  std::sort(cand.begin(), cand.end(), edge_less);
  cand.erase(std::unique(cand.begin(), cand.end(),
                         [](const MstEdge& x, const MstEdge& y) {
                           return x.u == y.u && x.v == y.v;
                         }),
             cand.end());

  // Local index per global id for the union-find and degree bookkeeping.
  std::vector<std::pair<uint32_t, uint32_t>> local;
  local.reserve(m);
  for (size_t i = 0; i < m; ++i) local.emplace_back(leaf[i], static_cast<uint32_t>(i));
  std::sort(local.begin(), local.end());
  auto index_of = [&](uint32_t gid) {
    return std::lower_bound(local.begin(), local.end(), std::make_pair(gid, 0u))->second;
  };

  UnionFind uf(m);
  std::vector<uint32_t> deg(m, 0);
  std::vector<MstEdge> accepted;
  accepted.reserve(m - 1);
  for (const MstEdge& e : cand) {
    if (accepted.size() == m - 1) break;
    uint32_t lu = index_of(e.u), lv = index_of(e.v);
    if (deg[lu] >= mst_degree || deg[lv] >= mst_degree) continue;
    if (uf.find(lu) == uf.find(lv)) continue;
    uf.unite(lu, lv);
    ++deg[lu];
    ++deg[lv];
    accepted.push_back(e);
  }
  return accepted;
}

namespace {

// Appends new neighbors per target with first-come dedupe. Overflow beyond
// capacity keeps the shortest edges; it cannot happen with per-tree MST
// degree <= mst_degree and capacity trees*mst_degree, but stay defensive.
void merge_tree_edges(NeighborGraph& g, const VectorDataset& ds, Metric metric,
                      std::span<const std::pair<uint32_t, uint32_t>> pairs, size_t workers,
                      std::vector<DistanceCounter>& counters) {
  GroupedPairs grouped = group_by_key(pairs, workers);
  BoundMetric dist(metric, ds.elem(), ds.dim());

  parallel_for(grouped.groups(), workers, [&](size_t gi, size_t worker) {
    size_t lo = grouped.group_offsets[gi], hi = grouped.group_offsets[gi + 1];
    uint32_t target = grouped.pairs[lo].first;

    std::span<const uint32_t> old = g.out_neighbors(target);
    std::vector<uint32_t> merged(old.begin(), old.end());
    for (size_t e = lo; e < hi; ++e) {
      uint32_t nb = grouped.pairs[e].second;
      if (nb == target) continue;
      if (std::find(merged.begin(), merged.end(), nb) == merged.end()) {
        merged.push_back(nb);
      }
    }

    if (merged.size() > g.capacity()) {
      std::vector<Neighbor> ranked;
      ranked.reserve(merged.size());
      const std::byte* t = ds.row_ptr(target);
      for (uint32_t id : merged) {
        ranked.push_back({id, dist(t, ds.row_ptr(id), counters[worker])});
      }
      std::sort(ranked.begin(), ranked.end(), neighbor_less);
      ranked.resize(g.capacity());
      merged.clear();
      for (const Neighbor& nb : ranked) merged.push_back(nb.id);
    }
    g.set_neighbors(target, merged);
  });
}

}  // namespace

NeighborGraph build_hcnng(const VectorDataset& ds, Metric metric, const HcnngParams& params,
                          size_t workers) {
  const uint32_t n = ds.size();
  if (n == 0) throw std::invalid_argument("cannot build over an empty dataset");
  if (params.trees == 0 || params.leaf_size == 0 || params.mst_degree == 0) {
    throw std::invalid_argument("trees, leaf size and degree cap must be positive");
  }
  const uint32_t knn =
      params.knn_per_leaf ? params.knn_per_leaf : std::max(10u, 3 * params.mst_degree);

  NeighborGraph g(n, params.trees * params.mst_degree);
  g.set_start(choose_start(ds, metric, workers));

  size_t w = resolve_workers(workers);
  std::vector<DistanceCounter> counters(w);

  std::vector<uint32_t> everyone(n);
  std::iota(everyone.begin(), everyone.end(), 0u);

  for (uint32_t t = 0; t < params.trees; ++t) {
    uint64_t tree_seed = mix64(params.seed, 0x74726565ULL, t);
    std::vector<std::vector<uint32_t>> leaves =
        cluster_leaves(ds, metric, everyone, params.leaf_size, tree_seed, workers, counters);

    std::vector<std::vector<MstEdge>> per_leaf(leaves.size());
    parallel_for(leaves.size(), workers, [&](size_t i, size_t worker) {
      per_leaf[i] = leaf_mst(ds, metric, leaves[i], params.mst_degree, knn, counters[worker]);
    });

    std::vector<std::pair<uint32_t, uint32_t>> pairs;
    size_t total = 0;
    for (const auto& es : per_leaf) total += es.size();
    pairs.reserve(2 * total);
    for (const auto& es : per_leaf) {
      for (const MstEdge& e : es) {
        pairs.emplace_back(e.u, e.v);
        pairs.emplace_back(e.v, e.u);
      }
    }
    merge_tree_edges(g, ds, metric, pairs, workers, counters);
  }
  return g;
}

}  // namespace graphann
