#pragma once

// Chunked Monte Carlo driver. Samples are split into fixed-size chunks that
// are reduced in chunk order, so results do not depend on the thread count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace powermdp {

inline constexpr std::uint64_t kChunkSize = 4096;

struct McConfig {
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;
    /// 0 means POWER_MDP_THREADS or, failing that, the hardware concurrency.
    unsigned threads = 0;
};

/// Mean and M2 accumulator with the pairwise merge rule.
struct RunningStats {
    std::uint64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++count;
        const double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }

    void merge(const RunningStats& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double n = static_cast<double>(count + o.count);
        const double d = o.mean - mean;
        mean += d * static_cast<double>(o.count) / n;
        m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) / n;
        count += o.count;
    }

    double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
    double std_error() const { return count > 0 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0; }
};

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("POWER_MDP_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(sample_index, acc) for every sample in [0, n). Each chunk gets a
/// fresh accumulator from make(); chunks are merged left to right.
template <class Acc, class Make, class Body, class Merge>
Acc run_chunked(std::uint64_t n, unsigned threads, Make make, Body body, Merge merge) {
    const std::uint64_t chunks = (n + kChunkSize - 1) / kChunkSize;
    std::vector<Acc> partial(chunks, make());
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::uint64_t failure_chunk = chunks;
    std::mutex failure_mutex;

    const auto worker = [&] {
        for (;;) {
            const auto c = next.fetch_add(1);
            if (c >= chunks) return;
            try {
                Acc acc = make();
                const auto end = std::min(n, (c + 1) * kChunkSize);
                for (auto i = c * kChunkSize; i < end; ++i) body(i, acc);
                partial[c] = std::move(acc);
            } catch (...) {
                // Keep the earliest failing chunk so the report is reproducible.
                std::lock_guard lock(failure_mutex);
                if (c < failure_chunk) {
                    failure = std::current_exception();
                    failure_chunk = c;
                }
                return;
            }
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(resolve_threads(threads),
                                                             static_cast<unsigned>(std::max<std::uint64_t>(1, chunks))));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < workers; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    Acc total = make();
    for (auto& p : partial) merge(total, p);
    return total;
}

} // namespace powermdp
