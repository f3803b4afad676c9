#pragma once

#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sphf::par {

// Runtime switch between the OpenMP kernels and the serial reference path.
// Exact arithmetic makes the two bit-identical; tests assert that.
bool& enabled_flag();
inline bool enabled() {
#ifdef _OPENMP
  return enabled_flag();
#else
  return false;
#endif
}

inline int worker_count() {
#ifdef _OPENMP
  return enabled() ? omp_get_max_threads() : 1;
#else
  return 1;
#endif
}

// Chunked map/merge over [0, n).  Each worker folds its contiguous chunk into
// a Local accumulator via fn(local, i); chunk accumulators are merged in
// index order, so the result matches the serial fold exactly.
template <class Local, class Fn, class Merge>
Local map_merge(std::size_t n, Local init, Fn&& fn, Merge&& merge, std::size_t min_grain = 2) {
  const int want = worker_count();
  if (want <= 1 || n < min_grain) {
    Local acc = std::move(init);
    for (std::size_t i = 0; i < n; ++i) fn(acc, i);
    return acc;
  }
  const std::size_t chunks = std::min<std::size_t>(std::size_t(want), n);
  std::vector<Local> locals(chunks, init);
#ifdef _OPENMP
#pragma omp parallel for schedule(static, 1)
  for (long long c = 0; c < (long long)chunks; ++c) {
    const std::size_t lo = std::size_t(c) * n / chunks, hi = (std::size_t(c) + 1) * n / chunks;
    for (std::size_t i = lo; i < hi; ++i) fn(locals[std::size_t(c)], i);
  }
#endif
  Local acc = std::move(locals[0]);
  for (std::size_t c = 1; c < chunks; ++c) merge(acc, std::move(locals[c]));
  return acc;
}

}  // namespace sphf::par
