#include "qt/parallel.hpp"

#include <algorithm>
#include <mutex>

namespace qt {

namespace {
int g_threads = 0;  // 0: use hardware concurrency
}

void set_thread_count(int n) { g_threads = n; }

int thread_count() {
    if (g_threads > 0) return g_threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_blocks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
    int workers = std::min<int>(thread_count(), static_cast<int>(nblocks));
    if (workers <= 1) {
        for (std::size_t b = 0; b < nblocks; ++b)
            fn(b, b * kReduceBlock, std::min(n, (b + 1) * kReduceBlock));
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::atomic<bool> failed{false};
    std::mutex err_mutex;
    auto work = [&] {
        for (;;) {
            std::size_t b = next.fetch_add(1);
            if (b >= nblocks || failed.load()) return;
            try {
                fn(b, b * kReduceBlock, std::min(n, (b + 1) * kReduceBlock));
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!failed.exchange(true)) err = std::current_exception();
                return;
            }
        }
    };
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failed.load()) std::rethrow_exception(err);
}

double pairwise_sum(const double* v, std::size_t n) {
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = v[0];
        for (std::size_t i = 1; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

double pairwise_combine(std::vector<double> partials) {
    return pairwise_sum(partials.data(), partials.size());
}

}  // namespace qt
