#include "fracmv/core/parallel.hpp"

namespace fracmv {

namespace {
std::atomic<unsigned> g_max_threads{1};
}

void set_max_threads(unsigned n) { g_max_threads.store(n == 0 ? 1 : n); }

unsigned max_threads() { return g_max_threads.load(); }

}  // namespace fracmv
