#include "phdae/parallel.h"

#include <atomic>
#include <cstdlib>
#include <string>

namespace phdae {
namespace {

std::atomic<int> g_threads{0};

int DefaultThreads() {
  if (const char* env = std::getenv("PHDAE_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return v;
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

int MaxThreads() {
  const int v = g_threads.load(std::memory_order_relaxed);
  return v >= 1 ? v : DefaultThreads();
}

void SetMaxThreads(int threads) {
  g_threads.store(threads >= 1 ? threads : 0, std::memory_order_relaxed);
}

}  // namespace phdae
