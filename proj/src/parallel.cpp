#include "lattice_smooth/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace latsm {

int worker_count() {
    int workers = static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    if (const char* cap = std::getenv("LATTICE_SMOOTH_THREADS")) {
        const long requested = std::strtol(cap, nullptr, 10);
        if (requested >= 1 && requested < workers) workers = static_cast<int>(requested);
    }
    return workers;
}

namespace {
thread_local bool inside_parallel_region = false;
}

void parallel_for(std::int64_t count, const std::function<void(std::int64_t)>& body) {
    if (count <= 0) return;
    const int workers = static_cast<int>(std::min<std::int64_t>(worker_count(), count));
    // Nested regions run serially; the outer loop already owns the pool.
    if (workers == 1 || inside_parallel_region) {
        for (std::int64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    // Chunked work stealing keeps the atomic traffic low on fine-grained bodies.
    const std::int64_t chunk = std::max<std::int64_t>(1, count / (8 * workers));
    auto run = [&]() {
        inside_parallel_region = true;
        for (;;) {
            const std::int64_t begin = next.fetch_add(chunk);
            if (begin >= count) break;
            const std::int64_t end = std::min(begin + chunk, count);
            try {
                for (std::int64_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                break;
            }
        }
        inside_parallel_region = false;
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers - 1));
    for (int w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace latsm
