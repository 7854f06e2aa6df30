#pragma once

#include <cstdint>
#include <functional>

namespace polyctrl {

// Execution policy for the data-parallel kernels (sample generation, design
// matrix assembly, batch evaluation). Serial is the reference implementation;
// OpenMP must produce bit-identical results since every work item writes only
// its own slot.
enum class ExecPolicy { Serial, OpenMP };

namespace detail {
void parallel_for_impl(std::int64_t count, const std::function<void(std::int64_t)>& body);
}

template <typename Fn>
void parallel_for(std::int64_t count, ExecPolicy policy, Fn&& body) {
  if (policy == ExecPolicy::Serial) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
  } else {
    detail::parallel_for_impl(count, std::function<void(std::int64_t)>(std::forward<Fn>(body)));
  }
}

}  // namespace polyctrl
