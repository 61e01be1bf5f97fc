#include "pacimdp/parallel.hpp"

#include <cstdlib>
#include <string>

namespace pacimdp {

unsigned defaultThreadCount() {
  if (const char* env = std::getenv("PACIMDP_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace pacimdp
