#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace flwin {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed of sub-stream `index` of stream `stream` under `master`:
/// splitmix64(splitmix64(master ^ splitmix64(stream)) + index).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
    return splitmix64(splitmix64(master ^ splitmix64(stream)) + index);
}

/// Stream tags keep the sub-streams of different quantities apart.
namespace streams {
inline constexpr std::uint64_t kPopulation = 1;
inline constexpr std::uint64_t kInterferers = 2;
inline constexpr std::uint64_t kUplink = 3;
inline constexpr std::uint64_t kDownlink = 4;
inline constexpr std::uint64_t kBandwidth = 5;
inline constexpr std::uint64_t kCompute = 6;
inline constexpr std::uint64_t kTask = 7;
inline constexpr std::uint64_t kTraining = 8;
inline constexpr std::uint64_t kBandwidthAnalytic = 9;
inline constexpr std::uint64_t kInterferenceSum = 10;
inline constexpr std::uint64_t kBandwidthDown = 11;
}  // namespace streams

/// Worker count: `requested` if nonzero, else hardware concurrency; both capped
/// by the FLWIN_THREADS environment variable when it is set.
unsigned worker_count(unsigned requested = 0);

/// Trials are cut into fixed-size blocks; block b draws from
/// derive_seed(seed, stream, b). Results therefore do not depend on how many
/// workers process the blocks.
inline constexpr std::size_t kTrialBlock = 4096;

/// Runs fn(block_index, begin, end) over all blocks of [0, n) and returns the
/// per-block results in block order.
template <class Result, class Fn>
std::vector<Result> run_blocks(std::size_t n, unsigned workers, Fn&& fn) {
    const std::size_t blocks = (n + kTrialBlock - 1) / kTrialBlock;
    std::vector<Result> results(blocks);
    if (blocks == 0) return results;
    const unsigned w = std::max(1u, std::min<unsigned>(worker_count(workers), static_cast<unsigned>(blocks)));
    auto body = [&](std::size_t b) {
        const std::size_t begin = b * kTrialBlock;
        const std::size_t end = std::min(n, begin + kTrialBlock);
        results[b] = fn(b, begin, end);
    };
    if (w == 1) {
        for (std::size_t b = 0; b < blocks; ++b) body(b);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(w);
        for (unsigned t = 0; t < w; ++t) {
            pool.emplace_back([&] {
                for (std::size_t b = next++; b < blocks; b = next++) {
                    try {
                        body(b);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                    }
                }
            });
        }
    }
    if (error) std::rethrow_exception(error);
    return results;
}

}  // namespace flwin
