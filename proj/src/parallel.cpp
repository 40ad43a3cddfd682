#include "graphann/parallel.hpp"

namespace graphann {

size_t resolve_workers(size_t workers) {
  if (workers != 0) return workers;
  size_t hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

}  // namespace graphann
