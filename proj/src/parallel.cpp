#include "qdem/parallel.hpp"

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace qdem {

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_chunks(std::int64_t count, int threads,
                     const std::function<void(int, std::int64_t, std::int64_t)>& fn) {
  if (count <= 0) return;
  const int workers = static_cast<int>(std::min<std::int64_t>(resolve_threads(threads), count));
  if (workers == 1) {
    fn(0, 0, count);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    const std::int64_t begin = count * w / workers;
    const std::int64_t end = count * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        fn(w, begin, end);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace qdem
