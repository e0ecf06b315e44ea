#pragma once

#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace mubforge::detail {

// splitmix64: tiny fully-specified generator, identical output on every
// platform (std distributions are not guaranteed bit-reproducible).
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() { return splitmix64_next(state_); }

    // uniform in [0, 1), 53-bit mantissa
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // uniform in [-1, 1)
    double symmetric() { return 2.0 * uniform() - 1.0; }

private:
    std::uint64_t state_;
};

// Decorrelates per-task seeds derived from one user seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (salt + 1));
    return splitmix64_next(s);
}

// Worker count for internal sweeps; MUBFORGE_THREADS caps it.
inline unsigned thread_limit() {
    static const unsigned limit = [] {
        unsigned hw = std::thread::hardware_concurrency();
        if (hw == 0) hw = 1;
        if (const char* env = std::getenv("MUBFORGE_THREADS")) {
            char* end = nullptr;
            long v = std::strtol(env, &end, 10);
            if (end != env && v >= 1 && static_cast<unsigned long>(v) < hw) {
                hw = static_cast<unsigned>(v);
            }
        }
        return hw;
    }();
    return limit;
}

// Runs fn(begin, end) over contiguous chunks of [0, n), possibly on
// several threads. Results must be combined order-independently or
// written to disjoint slots by the caller.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    unsigned workers = thread_limit();
    if (workers <= 1 || n < 2048) {
        fn(std::size_t{0}, n);
        return;
    }
    if (workers > n) workers = static_cast<unsigned>(n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned t = 0; t < workers; ++t) {
        std::size_t b = static_cast<std::size_t>(t) * chunk;
        std::size_t e = b + chunk < n ? b + chunk : n;
        if (b >= e) break;
        pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace mubforge::detail
