#pragma once

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>

namespace graphann {

// Fixed-capacity out-neighbor lists in one flat pool. Builders write whole
// lists for disjoint vertices; the degree is stored last with release order,
// so a concurrent reader sees either the previous list or the complete new
// one, never a torn mix.
class NeighborGraph {
 public:
  NeighborGraph() = default;
  NeighborGraph(uint32_t n, uint32_t capacity);

  NeighborGraph(NeighborGraph&&) noexcept = default;
  NeighborGraph& operator=(NeighborGraph&&) noexcept = default;
  NeighborGraph(const NeighborGraph&) = delete;
  NeighborGraph& operator=(const NeighborGraph&) = delete;
  NeighborGraph clone() const;

  uint32_t size() const { return n_; }
  uint32_t capacity() const { return cap_; }
  uint32_t start() const { return start_; }
  void set_start(uint32_t s);

  uint32_t degree(uint32_t v) const {
    check_vertex(v);
    return deg_[v].load(std::memory_order_acquire);
  }

  std::span<const uint32_t> out_neighbors(uint32_t v) const {
    check_vertex(v);
    uint32_t d = deg_[v].load(std::memory_order_acquire);
    return {pool_.get() + static_cast<size_t>(v) * cap_, d};
  }

  // Replaces v's list. Enforces the degree bound, id range and no self loop.
  // Callers are responsible for deduplicating ids first.
  void set_neighbors(uint32_t v, std::span<const uint32_t> ids);

  uint64_t total_edges() const;
  double mean_degree() const;
  uint32_t max_degree() const;

 private:
  void check_vertex(uint32_t v) const;

  uint32_t n_ = 0;
  uint32_t cap_ = 0;
  uint32_t start_ = 0;
  std::unique_ptr<uint32_t[]> pool_;
  std::unique_ptr<std::atomic<uint32_t>[]> deg_;
};

// Binary layout: magic "ANNG", u32 version, u32 n, u32 capacity, u32 start,
// u32 degrees[n], then the live neighbor ids concatenated in vertex order.
void save_graph(const NeighborGraph& g, const std::string& path);
void save_graph(const NeighborGraph& g, std::ostream& out);
NeighborGraph load_graph(const std::string& path);
NeighborGraph load_graph(std::istream& in, const std::string& context);

// Throws std::logic_error on a broken invariant: degree over capacity, a
// neighbor id out of range, a self loop, a duplicate neighbor, or a start
// vertex out of range.
void check_graph_invariants(const NeighborGraph& g);

}  // namespace graphann
