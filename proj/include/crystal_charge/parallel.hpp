#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

namespace crystal_charge {

/// Environment variable that overrides any requested worker count.
inline constexpr const char* kWorkersEnv = "CRYSTAL_CHARGE_WORKERS";

/// CRYSTAL_CHARGE_WORKERS if set, else `requested`, else hardware concurrency.
inline int worker_count(std::optional<int> requested = std::nullopt) {
    if (const char* env = std::getenv(kWorkersEnv)) {
        try {
            const int v = std::stoi(env);
            if (v > 0) return v;
        } catch (const std::exception&) {
            // unparsable override: fall through
        }
    }
    if (requested && *requested > 0) return *requested;
    return std::max(1U, std::thread::hardware_concurrency());
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Seed for shard `index` of a run seeded with `seed`: seed xor index, mixed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) { return splitmix64(seed ^ index); }

/// Runs fn(i) for i in [0, count) on up to `workers` threads. Results come
/// back in index order, so the output does not depend on scheduling.
template <class Fn>
auto parallel_map(std::size_t count, int workers, Fn&& fn) {
    using R = std::invoke_result_t<Fn&, std::size_t>;
    std::vector<std::optional<R>> slots(count);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < count;) {
            try {
                slots[i].emplace(fn(i));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const auto threads = static_cast<std::size_t>(std::max(1, workers));
    if (threads == 1 || count <= 1) {
        run();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(run);
    }
    if (failure) std::rethrow_exception(failure);
    std::vector<R> out;
    out.reserve(count);
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

} // namespace crystal_charge
