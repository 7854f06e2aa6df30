#include "polyctrl/parallel.hpp"

#include <omp.h>

namespace polyctrl::detail {

void parallel_for_impl(std::int64_t count, const std::function<void(std::int64_t)>& body) {
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < count; ++i) {
    body(i);
  }
}

}  // namespace polyctrl::detail
