#include "graphann/graph.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "graphann/core.hpp"

namespace graphann {

NeighborGraph::NeighborGraph(uint32_t n, uint32_t capacity) : n_(n), cap_(capacity) {
  if (n > 0 && capacity == 0) throw std::invalid_argument("graph capacity must be positive");
  pool_ = std::make_unique<uint32_t[]>(static_cast<size_t>(n) * capacity);
  deg_ = std::make_unique<std::atomic<uint32_t>[]>(n);
  for (uint32_t v = 0; v < n; v++) deg_[v].store(0, std::memory_order_relaxed);
}

NeighborGraph NeighborGraph::clone() const {
  NeighborGraph g(n_, cap_);
  g.start_ = start_;
  std::memcpy(g.pool_.get(), pool_.get(), static_cast<size_t>(n_) * cap_ * 4);
  for (uint32_t v = 0; v < n_; v++) {
    g.deg_[v].store(deg_[v].load(std::memory_order_relaxed), std::memory_order_relaxed);
  }
  return g;
}

void NeighborGraph::check_vertex(uint32_t v) const {
  if (v >= n_) {
    throw std::invalid_argument("vertex id " + std::to_string(v) + " out of range (n=" +
                                std::to_string(n_) + ")");
  }
}

void NeighborGraph::set_start(uint32_t s) {
  check_vertex(s);
  start_ = s;
}

void NeighborGraph::set_neighbors(uint32_t v, std::span<const uint32_t> ids) {
  check_vertex(v);
  if (ids.size() > cap_) {
    throw std::invalid_argument("degree " + std::to_string(ids.size()) + " exceeds capacity " +
                                std::to_string(cap_) + " at vertex " + std::to_string(v));
  }
  uint32_t* slot = pool_.get() + static_cast<size_t>(v) * cap_;
  for (size_t i = 0; i < ids.size(); i++) {
    uint32_t id = ids[i];
    if (id >= n_) {
      throw std::invalid_argument("neighbor id " + std::to_string(id) + " out of range at vertex " +
                                  std::to_string(v));
    }
    if (id == v) throw std::invalid_argument("self loop at vertex " + std::to_string(v));
    slot[i] = id;
  }
  deg_[v].store(static_cast<uint32_t>(ids.size()), std::memory_order_release);
}

uint64_t NeighborGraph::total_edges() const {
  uint64_t total = 0;
  for (uint32_t v = 0; v < n_; v++) total += deg_[v].load(std::memory_order_relaxed);
  return total;
}

double NeighborGraph::mean_degree() const {
  return n_ == 0 ? 0.0 : static_cast<double>(total_edges()) / n_;
}

uint32_t NeighborGraph::max_degree() const {
  uint32_t m = 0;
  for (uint32_t v = 0; v < n_; v++) m = std::max(m, deg_[v].load(std::memory_order_relaxed));
  return m;
}

void check_graph_invariants(const NeighborGraph& g) {
  if (g.size() == 0) return;
  if (g.start() >= g.size()) throw std::logic_error("start vertex out of range");
  std::vector<uint32_t> sorted;
  for (uint32_t v = 0; v < g.size(); v++) {
    auto nbrs = g.out_neighbors(v);
    if (nbrs.size() > g.capacity()) throw std::logic_error("degree exceeds capacity");
    sorted.assign(nbrs.begin(), nbrs.end());
    std::sort(sorted.begin(), sorted.end());
    for (size_t i = 0; i < sorted.size(); i++) {
      if (sorted[i] >= g.size()) throw std::logic_error("neighbor id out of range");
      if (sorted[i] == v) throw std::logic_error("self loop at vertex " + std::to_string(v));
      if (i > 0 && sorted[i] == sorted[i - 1]) {
        throw std::logic_error("duplicate neighbor at vertex " + std::to_string(v));
      }
    }
  }
}

namespace {
constexpr char kMagic[4] = {'A', 'N', 'N', 'G'};
constexpr uint32_t kVersion = 1;
}  // namespace

void save_graph(const NeighborGraph& g, std::ostream& out) {
  out.write(kMagic, 4);
  uint32_t header[4] = {kVersion, g.size(), g.capacity(), g.start()};
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  std::vector<uint32_t> degs(g.size());
  for (uint32_t v = 0; v < g.size(); v++) degs[v] = g.degree(v);
  out.write(reinterpret_cast<const char*>(degs.data()),
            static_cast<std::streamsize>(degs.size() * 4));
  for (uint32_t v = 0; v < g.size(); v++) {
    auto nbrs = g.out_neighbors(v);
    out.write(reinterpret_cast<const char*>(nbrs.data()),
              static_cast<std::streamsize>(nbrs.size() * 4));
  }
}

void save_graph(const NeighborGraph& g, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open for writing: " + path);
  save_graph(g, out);
  if (!out) throw io_error("write failed: " + path);
}

namespace {

void read_or_throw(std::istream& in, void* dst, size_t bytes, const std::string& context) {
  in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(bytes));
  if (static_cast<size_t>(in.gcount()) != bytes) {
    throw format_error("truncated graph data: " + context);
  }
}

}  // namespace

NeighborGraph load_graph(std::istream& in, const std::string& context) {
  char magic[4];
  read_or_throw(in, magic, 4, context);
  if (std::memcmp(magic, kMagic, 4) != 0) throw format_error("not a graph file: " + context);
  uint32_t header[4];
  read_or_throw(in, header, sizeof(header), context);
  if (header[0] != kVersion) {
    throw format_error("unsupported graph version " + std::to_string(header[0]) + ": " + context);
  }
  uint32_t n = header[1], cap = header[2], start = header[3];
  if (n > 0 && start >= n) throw format_error("start vertex out of range: " + context);

  std::vector<uint32_t> degs(n);
  read_or_throw(in, degs.data(), static_cast<size_t>(n) * 4, context);
  NeighborGraph g(n, cap);
  if (n > 0) g.set_start(start);
  std::vector<uint32_t> nbrs;
  for (uint32_t v = 0; v < n; v++) {
    if (degs[v] > cap) throw format_error("degree exceeds capacity at vertex " +
                                          std::to_string(v) + ": " + context);
    nbrs.resize(degs[v]);
    read_or_throw(in, nbrs.data(), static_cast<size_t>(degs[v]) * 4, context);
    try {
      g.set_neighbors(v, nbrs);
    } catch (const std::invalid_argument& e) {
      throw format_error(std::string(e.what()) + ": " + context);
    }
  }
  try {
    check_graph_invariants(g);
  } catch (const std::logic_error& e) {
    throw format_error(std::string(e.what()) + ": " + context);
  }
  return g;
}

NeighborGraph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open for reading: " + path);
  NeighborGraph g = load_graph(in, path);
  // anything left over means the file does not match its own header
  in.peek();
  if (!in.eof()) throw format_error("trailing bytes: " + path);
  return g;
}

}  // namespace graphann
