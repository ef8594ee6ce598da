#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace qt {

// Worker count used by quadrature and sampling loops. Results are
// independent of this setting: reductions follow a fixed pairwise tree.
void set_thread_count(int n);
int thread_count();

// Fixed block size of the deterministic reduction tree.
inline constexpr std::size_t kReduceBlock = 4096;

// Runs fn(block_index, begin, end) over [0, n) split into kReduceBlock
// chunks; blocks are distributed over workers, chunk boundaries do not
// depend on the worker count.
void parallel_blocks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

// Pairwise sum of v[begin, end) in fixed order.
double pairwise_sum(const double* v, std::size_t n);

// Combines per-block partial sums with the same pairwise tree.
double pairwise_combine(std::vector<double> partials);

}  // namespace qt
