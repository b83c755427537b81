#include "jointslab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace jointslab {

namespace {
std::atomic<std::size_t> g_workers{0};
}

std::size_t resolve_workers(std::size_t requested) {
  if (const char* env = std::getenv("JOINTSLAB_WORKERS")) {
    try {
      long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  if (requested > 0) return requested;
  std::size_t hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

void set_default_workers(std::size_t workers) { g_workers.store(workers); }

std::size_t default_workers() {
  std::size_t w = g_workers.load();
  if (w == 0) {
    w = resolve_workers(0);
    g_workers.store(w);
  }
  return w;
}

}  // namespace jointslab
