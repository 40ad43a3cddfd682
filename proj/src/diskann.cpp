#include "graphann/diskann.hpp"

#include <cstdio>
#include <stdexcept>

#include "graphann/builder_common.hpp"
#include "graphann/parallel.hpp"
#include "graphann/search.hpp"

namespace graphann {

std::vector<std::pair<uint32_t, uint32_t>> insert_point(NeighborGraph& g,
                                                        const VectorDataset& ds, Metric metric,
                                                        uint32_t j, const DiskannParams& params,
                                                        DistanceCounter& counter) {
  // k = beam so the whole candidate list is drained, as in the plain
  // traversal; only the visited set matters here.
  SearchParams sp{params.build_beam, params.build_beam, 0.0f};
  SearchResult found = beam_search(g, ds, metric, ds.row(j), sp, &counter);

  PruneParams pp{params.degree_bound, params.alpha, params.rule};
  std::vector<uint32_t> kept = alpha_prune(j, found.visited, pp, ds, metric, counter);
  g.set_neighbors(j, kept);

  std::vector<std::pair<uint32_t, uint32_t>> back;
  back.reserve(kept.size());
  for (uint32_t q : kept) back.emplace_back(q, j);
  return back;
}

NeighborGraph build_diskann(const VectorDataset& ds, Metric metric,
                            const DiskannParams& params, size_t workers) {
  const uint32_t n = ds.size();
  if (n == 0) throw std::invalid_argument("cannot build over an empty dataset");
  if (params.build_beam == 0 || params.degree_bound == 0) {
    throw std::invalid_argument("build beam and degree bound must be positive");
  }
  if (params.build_beam < params.degree_bound) {
    std::fprintf(stderr,
                 "warning: build beam %u below degree bound %u; lists will be thin\n",
                 params.build_beam, params.degree_bound);
  }

  NeighborGraph g(n, params.degree_bound);
  uint32_t start = choose_start(ds, metric, workers);
  g.set_start(start);
  std::vector<uint32_t> order = shuffled_order(n, mix64(params.seed, 0x696e73657274ULL), start);

  size_t w = resolve_workers(workers);
  std::vector<DistanceCounter> counters(w);
  PruneParams pp{params.degree_bound, params.alpha, params.rule};

  for (auto [lo, hi] : batch_ranges(n)) {
    const uint32_t count = hi - lo;
    std::vector<std::vector<std::pair<uint32_t, uint32_t>>> back(count);
    parallel_for(count, workers, [&](size_t b, size_t worker) {
      uint32_t j = order[lo + b];
      back[b] = insert_point(g, ds, metric, j, params, counters[worker]);
    });

    std::vector<std::pair<uint32_t, uint32_t>> edges;
    size_t total = 0;
    for (const auto& v : back) total += v.size();
    edges.reserve(total);
    for (const auto& v : back) edges.insert(edges.end(), v.begin(), v.end());

    apply_back_edges(g, ds, metric, edges, pp, workers, counters);
  }
  return g;
}

}  // namespace graphann
