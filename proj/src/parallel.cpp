#include "gibbsflow/parallel.hpp"

#include <cstdlib>
#include <string>

namespace gibbsflow {

namespace {
std::atomic<unsigned> g_threads{0};
}

unsigned default_threads() {
    if (const unsigned n = g_threads.load(); n > 0) return n;
    if (const char* env = std::getenv("GIBBSFLOW_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return static_cast<unsigned>(n);
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void set_default_threads(unsigned n) { g_threads.store(n); }

}  // namespace gibbsflow
