#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace boxray {

/// Worker count from BOXRAY_NUM_THREADS, else the hardware concurrency.
int worker_count();

/// Splits [0, count) into `workers` contiguous chunks and runs
/// f(chunk, begin, end) for each, chunk 0 on the calling thread.
template <class F>
void parallel_chunks(std::size_t count, int workers, F&& f) {
  if (workers < 1) workers = 1;
  if (static_cast<std::size_t>(workers) > count) workers = count == 0 ? 1 : static_cast<int>(count);
  auto bounds = [&](int w) { return count * static_cast<std::size_t>(w) / workers; };
  if (workers == 1) {
    f(0, std::size_t{0}, count);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (int w = 1; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        f(w, bounds(w), bounds(w + 1));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  try {
    f(0, bounds(0), bounds(1));
  } catch (...) {
    errors[0] = std::current_exception();
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace boxray
