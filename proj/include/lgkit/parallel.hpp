#pragma once

#include <cstddef>
#include <exception>
#include <type_traits>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lgkit {

enum class Exec { serial, parallel };

/// Evaluates f(0..n-1) into an index-ordered vector. Exec::serial is the
/// reference loop; Exec::parallel splits samples across OpenMP threads.
/// Results land at their sample index in both cases, so any reduction done
/// afterwards is order-identical. The first exception by sample index is
/// rethrown after the loop.
template <class F>
auto sample_map(std::size_t n, F&& f, Exec exec = Exec::parallel)
    -> std::vector<std::invoke_result_t<F&, std::size_t>> {
  using R = std::invoke_result_t<F&, std::size_t>;
  std::vector<R> out(n);
  std::vector<std::exception_ptr> errors(n);

  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        out[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (long long i = 0; i < count; ++i) {
      const auto k = static_cast<std::size_t>(i);
      try {
        out[k] = f(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  }

  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline int worker_count() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace lgkit
