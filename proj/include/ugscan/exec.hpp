// Execution policy shared by the parallel kernels and their serial reference paths.
#pragma once
#include <atomic>
#include <exception>
#include <vector>

namespace ugscan {

enum class ExecMode { serial, parallel };

// indexed loop with optional OpenMP; each iteration owns its output slot, exceptions are
// captured and rethrown in index order so both modes fail identically
template <class F>
void parallel_index(int n, ExecMode exec, F&& body) {
  std::vector<std::exception_ptr> errs(static_cast<std::size_t>(n));
  std::atomic<bool> failed{false};
#pragma omp parallel for schedule(dynamic) if (exec == ExecMode::parallel)
  for (int i = 0; i < n; ++i) {
    try {
      body(i);
    } catch (...) {
      errs[size_t(i)] = std::current_exception();
      failed.store(true);
    }
  }
  if (failed.load())
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
}

}  // namespace ugscan
