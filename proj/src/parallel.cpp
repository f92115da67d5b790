#include "levyou/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

namespace levyou {

int worker_count(int requested) {
  int n = requested > 0 ? requested : static_cast<int>(std::thread::hardware_concurrency());
  n = std::max(n, 1);
  if (const char* cap = std::getenv("LEVYOU_THREADS")) {
    try {
      int c = std::stoi(cap);
      if (c > 0) n = std::min(n, c);
    } catch (...) {
      // unparsable caps are ignored
    }
  }
  return n;
}

}  // namespace levyou
