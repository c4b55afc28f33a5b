#include "crlab/parallel.hpp"

#include <cstdlib>
#include <string>
#include <thread>

namespace crlab {

unsigned default_workers() {
  if (const char* env = std::getenv("CRLAB_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace crlab
