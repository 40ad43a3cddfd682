#include "graphann/metric.hpp"

#include <stdexcept>

namespace graphann {

namespace detail {
std::atomic<std::atomic<uint64_t>*> g_distance_shadow{nullptr};
}

void set_distance_shadow(std::atomic<uint64_t>* shadow) {
  detail::g_distance_shadow.store(shadow, std::memory_order_relaxed);
}

const char* elem_name(ElemKind k) {
  switch (k) {
    case ElemKind::u8: return "u8";
    case ElemKind::i8: return "i8";
    case ElemKind::f32: return "f32";
  }
  return "?";
}

const char* metric_name(Metric m) {
  return m == Metric::l2_squared ? "l2" : "ip";
}

Metric metric_from_name(const std::string& name) {
  if (name == "l2") return Metric::l2_squared;
  if (name == "ip") return Metric::neg_inner_product;
  throw std::invalid_argument("unknown metric '" + name + "' (expected l2 or ip)");
}

namespace {

// Integer inputs accumulate in int32 (255^2 * 2^15 dims still fits),
// floats accumulate in float.
template <typename T, typename Acc>
float l2sq_kernel(const std::byte* a, const std::byte* b, uint32_t d) {
  const T* x = reinterpret_cast<const T*>(a);
  const T* y = reinterpret_cast<const T*>(b);
  Acc acc = 0;
  for (uint32_t i = 0; i < d; i++) {
    Acc diff = static_cast<Acc>(x[i]) - static_cast<Acc>(y[i]);
    acc += diff * diff;
  }
  return static_cast<float>(acc);
}

template <typename T, typename Acc>
float neg_ip_kernel(const std::byte* a, const std::byte* b, uint32_t d) {
  const T* x = reinterpret_cast<const T*>(a);
  const T* y = reinterpret_cast<const T*>(b);
  Acc acc = 0;
  for (uint32_t i = 0; i < d; i++) {
    acc += static_cast<Acc>(x[i]) * static_cast<Acc>(y[i]);
  }
  return -static_cast<float>(acc);
}

}  // namespace

RawDistanceFn resolve_distance_kernel(Metric metric, ElemKind elem) {
  if (metric == Metric::l2_squared) {
    switch (elem) {
      case ElemKind::u8: return l2sq_kernel<uint8_t, int32_t>;
      case ElemKind::i8: return l2sq_kernel<int8_t, int32_t>;
      case ElemKind::f32: return l2sq_kernel<float, float>;
    }
  } else {
    switch (elem) {
      case ElemKind::u8: return neg_ip_kernel<uint8_t, int32_t>;
      case ElemKind::i8: return neg_ip_kernel<int8_t, int32_t>;
      case ElemKind::f32: return neg_ip_kernel<float, float>;
    }
  }
  throw std::invalid_argument("unknown metric/element combination");
}

float distance(Metric metric, const VectorView& a, const VectorView& b, DistanceCounter& c) {
  if (a.dim != b.dim) {
    throw std::invalid_argument("distance: dimension mismatch (" + std::to_string(a.dim) +
                                " vs " + std::to_string(b.dim) + ")");
  }
  if (a.elem != b.elem) {
    throw std::invalid_argument(std::string("distance: element kind mismatch (") +
                                elem_name(a.elem) + " vs " + elem_name(b.elem) + ")");
  }
  return BoundMetric(metric, a.elem, a.dim)(a.data, b.data, c);
}

}  // namespace graphann
