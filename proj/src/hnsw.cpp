#include "graphann/hnsw.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "graphann/builder_common.hpp"
#include "graphann/parallel.hpp"

namespace graphann {

uint32_t level_from_uniform(double u, uint32_t m) {
  if (m < 2) throw std::invalid_argument("level law needs m >= 2");
  if (!(u > 0.0) || u > 1.0) throw std::invalid_argument("u must lie in (0, 1]");
  double lvl = std::floor(-std::log(u) / std::log(static_cast<double>(m)));
  // u is bounded away from 0 by 2^-53, so lvl is small; the clamp is just
  // paranoia against denormal surprises.
  return static_cast<uint32_t>(std::min(lvl, 64.0));
}

uint32_t assign_level(uint64_t seed, uint32_t id, uint32_t m) {
  return level_from_uniform(uniform_unit(mix64(seed, id)), m);
}

namespace {

std::vector<std::pair<uint32_t, uint32_t>> insert_into_layer(NeighborGraph& g,
                                                             const VectorDataset& ds,
                                                             Metric metric, uint32_t j,
                                                             uint32_t ef, const PruneParams& pp,
                                                             DistanceCounter& counter) {
  SearchParams sp{ef, ef, 0.0f};
  SearchResult found = beam_search(g, ds, metric, ds.row(j), sp, &counter);
  std::vector<uint32_t> kept = alpha_prune(j, found.visited, pp, ds, metric, counter);
  g.set_neighbors(j, kept);

  std::vector<std::pair<uint32_t, uint32_t>> back;
  back.reserve(kept.size());
  for (uint32_t q : kept) back.emplace_back(q, j);
  return back;
}

void write_u32(std::ostream& out, uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

uint32_t read_u32(std::istream& in, const std::string& context) {
  uint32_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!in) throw format_error("truncated index file: " + context);
  return v;
}

}  // namespace

HnswIndex build_hnsw(const VectorDataset& ds, Metric metric, const HnswParams& params,
                     size_t workers) {
  const uint32_t n = ds.size();
  if (n == 0) throw std::invalid_argument("cannot build over an empty dataset");
  if (params.m < 2) throw std::invalid_argument("m must be at least 2");
  if (params.ef_construction == 0) throw std::invalid_argument("ef_construction must be positive");

  HnswIndex index;
  index.m_ = params.m;
  index.levels_.assign(n, 0);
  if (!params.single_layer) {
    for (uint32_t v = 0; v < n; ++v) index.levels_[v] = assign_level(params.seed, v, params.m);
  }

  uint32_t top = 0, entry = 0;
  for (uint32_t v = 0; v < n; ++v) {
    if (index.levels_[v] > top) {
      top = index.levels_[v];
      entry = v;
    }
  }
  index.entry_ = entry;

  index.layers_.reserve(top + 1);
  for (uint32_t l = 0; l <= top; ++l) {
    index.layers_.emplace_back(n, l == 0 ? 2 * params.m : params.m);
    index.layers_.back().set_start(entry);
  }

  size_t w = resolve_workers(workers);
  std::vector<DistanceCounter> counters(w);

  // Top to bottom. Each layer is an independent doubling-batch build over its
  // member set; every insertion search enters at the global entry vertex,
  // which belongs to all layers. No cross-layer descent during construction:
  // a vertex present above the layer being built would only route the search
  // to itself.
  for (uint32_t l = top + 1; l-- > 0;) {
    NeighborGraph& g = index.layers_[l];
    const uint32_t cap = l == 0 ? 2 * params.m : params.m;

    std::vector<uint32_t> members;
    for (uint32_t v = 0; v < n; ++v) {
      if (index.levels_[v] >= l) members.push_back(v);
    }
    std::mt19937_64 rng(mix64(params.seed, 0x6c6179657273ULL, l));
    std::shuffle(members.begin(), members.end(), rng);
    auto ep = std::find(members.begin(), members.end(), entry);
    std::iter_swap(members.begin(), ep);

    PruneParams pp{cap, params.alpha, params.rule};
    for (auto [lo, hi] : batch_ranges(static_cast<uint32_t>(members.size()))) {
      const uint32_t count = hi - lo;
      std::vector<std::vector<std::pair<uint32_t, uint32_t>>> back(count);
      parallel_for(count, workers, [&](size_t b, size_t worker) {
        uint32_t j = members[lo + b];
        back[b] = insert_into_layer(g, ds, metric, j, params.ef_construction, pp,
                                    counters[worker]);
      });

      std::vector<std::pair<uint32_t, uint32_t>> edges;
      size_t total = 0;
      for (const auto& v : back) total += v.size();
      edges.reserve(total);
      for (const auto& v : back) edges.insert(edges.end(), v.begin(), v.end());

      apply_back_edges(g, ds, metric, edges, pp, workers, counters);
    }
  }
  return index;
}

SearchResult search_hnsw(const HnswIndex& index, const VectorDataset& ds, Metric metric,
                         const VectorView& q, const SearchParams& params,
                         DistanceCounter* counter) {
  if (index.size() == 0) return {};

  uint32_t cur = index.entry();
  uint64_t upper_comps = 0;
  SearchParams hop{1, 1, 0.0f};
  for (uint32_t l = index.max_level(); l > 0; --l) {
    SearchResult r = beam_search(index.layer(l), ds, metric, q, hop, counter, cur);
    upper_comps += r.dist_comps;
    if (!r.neighbors.empty()) cur = r.neighbors[0].id;
  }

  SearchResult out = beam_search(index.layer(0), ds, metric, q, params, counter, cur);
  out.dist_comps += upper_comps;
  return out;
}

void save_hnsw(const HnswIndex& index, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open for writing: " + path);

  out.write("ANNH", 4);
  write_u32(out, 1);  // version
  write_u32(out, index.size());
  write_u32(out, index.m());
  write_u32(out, index.entry());
  write_u32(out, index.num_layers());
  out.write(reinterpret_cast<const char*>(index.levels().data()),
            static_cast<std::streamsize>(index.size() * sizeof(uint32_t)));
  for (uint32_t l = 0; l < index.num_layers(); ++l) save_graph(index.layer(l), out);
  if (!out) throw io_error("write failed: " + path);
}

HnswIndex load_hnsw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open: " + path);

  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::string_view(magic, 4) != "ANNH") {
    throw format_error("not a layered index file: " + path);
  }
  uint32_t version = read_u32(in, path);
  if (version != 1) throw format_error("unsupported index version in " + path);

  uint32_t n = read_u32(in, path);
  uint32_t m = read_u32(in, path);
  uint32_t entry = read_u32(in, path);
  uint32_t num_layers = read_u32(in, path);
  if (n == 0 || m < 2 || entry >= n || num_layers == 0 || num_layers > 65) {
    throw format_error("implausible index header in " + path);
  }

  HnswIndex index;
  index.m_ = m;
  index.entry_ = entry;
  index.levels_.resize(n);
  in.read(reinterpret_cast<char*>(index.levels_.data()),
          static_cast<std::streamsize>(n * sizeof(uint32_t)));
  if (!in) throw format_error("truncated index file: " + path);
  for (uint32_t v = 0; v < n; ++v) {
    if (index.levels_[v] >= num_layers) {
      throw format_error("vertex level out of range in " + path);
    }
  }
  if (index.levels_[entry] != num_layers - 1) {
    throw format_error("entry vertex does not reach the top layer in " + path);
  }

  index.layers_.reserve(num_layers);
  for (uint32_t l = 0; l < num_layers; ++l) {
    NeighborGraph g = load_graph(in, path);
    if (g.size() != n) throw format_error("layer size mismatch in " + path);
    index.layers_.push_back(std::move(g));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw format_error("trailing bytes in " + path);
  }
  return index;
}

}  // namespace graphann
