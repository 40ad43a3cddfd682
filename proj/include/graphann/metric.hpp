#pragma once

#include <atomic>
#include <cstdint>
#include <string>

#include "graphann/core.hpp"

namespace graphann {

// Distances are kept in their raw comparable form: squared Euclidean and
// negated inner product. Nothing in the library ever takes a square root;
// radii arriving in reported units are converted once at the API boundary.
enum class Metric : uint8_t { l2_squared, neg_inner_product };

const char* metric_name(Metric m);
Metric metric_from_name(const std::string& name);  // "l2" | "ip"

// Exact count of kernel evaluations. Each worker owns one; merge by summing.
struct DistanceCounter {
  uint64_t count = 0;
};

// Second, independent tally used by tests to cross-check DistanceCounter.
// While installed, every kernel evaluation also bumps the atomic.
void set_distance_shadow(std::atomic<uint64_t>* shadow);

using RawDistanceFn = float (*)(const std::byte*, const std::byte*, uint32_t);

RawDistanceFn resolve_distance_kernel(Metric metric, ElemKind elem);

namespace detail {
extern std::atomic<std::atomic<uint64_t>*> g_distance_shadow;
inline void tick_shadow() {
  auto* s = g_distance_shadow.load(std::memory_order_relaxed);
  if (s != nullptr) s->fetch_add(1, std::memory_order_relaxed);
}
}  // namespace detail

// Kernel resolved once for a fixed element kind and dimension. All hot loops
// evaluate through operator() so the count stays exactly one per evaluation.
class BoundMetric {
 public:
  BoundMetric(Metric metric, ElemKind elem, uint32_t dim)
      : fn_(resolve_distance_kernel(metric, elem)),
        dim_(dim),
        stride_(elem_size(elem) * dim) {}

  float operator()(const std::byte* a, const std::byte* b, DistanceCounter& c) const {
    c.count += 1;
    detail::tick_shadow();
    return fn_(a, b, dim_);
  }

  uint32_t dim() const { return dim_; }
  size_t stride() const { return stride_; }

 private:
  RawDistanceFn fn_;
  uint32_t dim_;
  size_t stride_;
};

// Checked one-shot evaluation; throws std::invalid_argument when the views
// disagree on dimension or element kind.
float distance(Metric metric, const VectorView& a, const VectorView& b, DistanceCounter& c);

}  // namespace graphann
