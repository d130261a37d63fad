#include "pixshuf/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pixshuf::parallel {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

int max_threads() {
    int n = g_max_threads.load();
    if (n == 0) {
        unsigned hw = std::thread::hardware_concurrency();
        n = hw == 0 ? 1 : static_cast<int>(hw);
    }
    return n;
}

std::size_t chunk_count(std::size_t total, std::size_t chunk_size) {
    if (total == 0) return 0;
    return (total + chunk_size - 1) / chunk_size;
}

void for_chunks(std::size_t total, std::size_t chunk_size,
                const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    const std::size_t n_chunks = chunk_count(total, chunk_size);
    if (n_chunks == 0) return;

    auto run_chunk = [&](std::size_t ci) {
        const std::size_t begin = ci * chunk_size;
        const std::size_t end = std::min(begin + chunk_size, total);
        fn(ci, begin, end);
    };

    const int workers = std::min<std::size_t>(std::max(max_threads(), 1), n_chunks);
    if (workers <= 1) {
        for (std::size_t ci = 0; ci < n_chunks; ++ci) run_chunk(ci);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t ci = next.fetch_add(1);
            if (ci >= n_chunks) return;
            try {
                run_chunk(ci);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace pixshuf::parallel
