#include "trendflow/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace trendflow {

std::size_t worker_count() {
    if (const char* env = std::getenv("TRENDFLOW_THREADS")) {
        std::size_t n = 0;
        auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), n);
        if (ec == std::errc() && n > 0) return n;
    }
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

}  // namespace trendflow
