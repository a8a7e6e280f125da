#include "flwin/random.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace flwin {

unsigned worker_count(unsigned requested) {
    unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FLWIN_THREADS"); env != nullptr && *env != '\0') {
        unsigned cap = 0;
        const auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), cap);
        if (ec == std::errc() && cap > 0) n = std::min(n, cap);
    }
    return n;
}

}  // namespace flwin
