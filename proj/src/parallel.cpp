#include "tou/parallel.hpp"

#include <cstdlib>
#include <string>

namespace tou {

std::size_t worker_count() noexcept {
  if (const char* env = std::getenv("TOU_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<std::size_t>(v);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : std::min<std::size_t>(hw, 64);
}

}  // namespace tou
