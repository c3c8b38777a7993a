#pragma once

// Deterministic block-parallel helpers: work over [0, total) is split into
// contiguous blocks claimed in ascending order, and per-worker results are
// merged with commutative combiners, so results never depend on the worker
// count.

#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <thread>
#include <vector>

namespace froblab::detail {

using u64 = std::uint64_t;

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(begin, end, acc) over contiguous blocks of [0, total); returns the
// per-worker accumulators. The caller's combine must be commutative.
template <class Acc, class BlockFn>
std::vector<Acc> parallel_blocks(u64 total, int workers, const Acc& init, BlockFn fn) {
    workers = resolve_workers(workers);
    if (total == 0) return {};
    u64 max_blocks = static_cast<u64>(workers) * 8;
    u64 n_blocks = total < max_blocks ? total : max_blocks;
    u64 block = (total + n_blocks - 1) / n_blocks;

    if (workers == 1 || n_blocks == 1) {
        std::vector<Acc> accs(1, init);
        for (u64 b = 0; b < total; b += block) {
            u64 e = b + block < total ? b + block : total;
            fn(b, e, accs[0]);
        }
        return accs;
    }

    std::vector<Acc> accs(static_cast<size_t>(workers), init);
    std::atomic<u64> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr eptr;
    std::mutex eptr_mu;

    auto body = [&](int w) {
        try {
            while (!failed.load(std::memory_order_relaxed)) {
                u64 b = next.fetch_add(block, std::memory_order_relaxed);
                if (b >= total) break;
                u64 e = b + block < total ? b + block : total;
                fn(b, e, accs[static_cast<size_t>(w)]);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lk(eptr_mu);
            if (!eptr) eptr = std::current_exception();
            failed.store(true, std::memory_order_relaxed);
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body, w);
    for (auto& t : pool) t.join();
    if (eptr) std::rethrow_exception(eptr);
    return accs;
}

// Least index i in [0, total) with probe(i) true, or nullopt. Blocks are
// claimed in ascending order and skipped once they lie past the best hit,
// so the result is the global minimum regardless of scheduling.
template <class Probe>
std::optional<u64> parallel_min_search(u64 total, int workers, Probe probe) {
    workers = resolve_workers(workers);
    if (total == 0) return std::nullopt;

    if (workers == 1) {
        for (u64 i = 0; i < total; ++i)
            if (probe(i)) return i;
        return std::nullopt;
    }

    u64 n_blocks = static_cast<u64>(workers) * 16;
    if (n_blocks > total) n_blocks = total;
    u64 block = (total + n_blocks - 1) / n_blocks;

    std::atomic<u64> next{0};
    std::atomic<u64> best{~u64(0)};
    std::atomic<bool> failed{false};
    std::exception_ptr eptr;
    std::mutex eptr_mu;

    auto body = [&]() {
        try {
            while (!failed.load(std::memory_order_relaxed)) {
                u64 b = next.fetch_add(block, std::memory_order_relaxed);
                if (b >= total) break;
                if (b > best.load(std::memory_order_relaxed)) break;
                u64 e = b + block < total ? b + block : total;
                for (u64 i = b; i < e; ++i) {
                    if (probe(i)) {
                        u64 cur = best.load(std::memory_order_relaxed);
                        while (i < cur && !best.compare_exchange_weak(cur, i)) {}
                        break;
                    }
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> lk(eptr_mu);
            if (!eptr) eptr = std::current_exception();
            failed.store(true, std::memory_order_relaxed);
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (eptr) std::rethrow_exception(eptr);

    u64 found = best.load();
    if (found == ~u64(0)) return std::nullopt;
    return found;
}

}  // namespace froblab::detail
