#include "qmicro/rng.hpp"

#include <cstdlib>
#include <string>
#include <thread>

namespace qmicro {

unsigned worker_threads() {
    if (const char* env = std::getenv("QMICRO_THREADS")) {
        try {
            const long value = std::stol(env);
            if (value > 0) return static_cast<unsigned>(value);
        } catch (...) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace qmicro
