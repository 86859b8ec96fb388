#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace scenopt {

// --threads value if given, else SCENARIO_OPT_THREADS, else 1.
inline std::size_t resolve_threads(std::optional<std::size_t> requested = std::nullopt) {
    if (requested && *requested > 0) return *requested;
    if (const char* env = std::getenv("SCENARIO_OPT_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<std::size_t>(v);
        } catch (...) {
        }
    }
    return 1;
}

// Splits [0, count) into at most `threads` contiguous chunks and runs
// body(chunk, begin, end) for each. Chunk boundaries depend only on
// (count, threads); callers that merge per-chunk results in chunk order get
// thread-count independent output as long as the merge is associative.
template <typename Body>
void parallel_chunks(std::size_t count, std::size_t threads, Body&& body) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads <= 1) {
        if (count > 0) body(std::size_t{0}, std::size_t{0}, count);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t base = count / threads;
    const std::size_t extra = count % threads;
    std::size_t begin = 0;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t end = begin + base + (t < extra ? 1 : 0);
        pool.emplace_back([&, t, begin, end] {
            try {
                body(t, begin, end);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

// body(i) for every i in [0, count); each index is visited exactly once.
template <typename Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body) {
    parallel_chunks(count, threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) body(i);
    });
}

}  // namespace scenopt
