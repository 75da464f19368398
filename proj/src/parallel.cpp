#include "vlab/parallel.hpp"

#include <cstdlib>
#include <string>

namespace vlab {

int worker_count() {
  if (const char* env = std::getenv("VLAB_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

}  // namespace vlab
