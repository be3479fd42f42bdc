#ifndef GFL_PARALLEL_HPP
#define GFL_PARALLEL_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace gfl {

// Process-wide worker count used by every parallel loop. Defaults to 1.
void set_thread_count(int n);
int thread_count();

// Runs body(i) for i in [0, n). Iterations must write disjoint outputs;
// the partition into threads never influences results.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Fixed block width for ordered reductions. Independent of thread count so
// that partial sums, and therefore rounding, never depend on it.
inline constexpr std::size_t kReductionBlock = 1024;

// Deterministic reduction: map each fixed block [b, e) to a partial value in
// parallel, then combine the partials by a fixed pairwise tree.
template <typename T, typename MapBlock, typename Combine>
T ordered_reduce(std::size_t n, MapBlock map_block, Combine combine, T zero) {
  const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
  if (blocks == 0) return zero;
  std::vector<T> partial(blocks, zero);
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t begin = b * kReductionBlock;
    const std::size_t end = begin + kReductionBlock < n ? begin + kReductionBlock : n;
    partial[b] = map_block(begin, end);
  });
  for (std::size_t width = 1; width < blocks; width *= 2) {
    for (std::size_t i = 0; i + width < blocks; i += 2 * width) {
      partial[i] = combine(partial[i], partial[i + width]);
    }
  }
  return partial[0];
}

}  // namespace gfl

#endif  // GFL_PARALLEL_HPP
