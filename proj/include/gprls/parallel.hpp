#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace gprls {

// Chunked parallel map over [0, n). Each index must write only its own
// output slot, so results do not depend on the schedule. threads == 0 picks
// the hardware count; threads == 1 runs inline.
template <typename F>
void parallel_for(std::size_t n, unsigned threads, F&& body) {
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(threads, n));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers)
                    body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace gprls
