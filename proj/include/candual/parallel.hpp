#pragma once

#include <atomic>
#include <cstdint>
#include <vector>

#ifdef CANDUAL_HAS_OPENMP
#include <omp.h>
#endif

namespace candual::par {

// ---------------------------------------------------------------------------
// Deterministic data-parallel reductions.
//
// Every reduction is evaluated over a fixed number of index chunks; each chunk
// is accumulated left-to-right by a single thread and the per-chunk partials
// are combined serially in chunk order.  The floating-point result is
// therefore a pure function of the input -- identical for any thread count
// and identical with parallelism disabled -- at the cost of one extra pass
// over at most kChunks partials.
// ---------------------------------------------------------------------------

inline constexpr std::int64_t kChunks = 256;

inline std::atomic<bool>& parallel_flag() noexcept {
  static std::atomic<bool> flag{true};
  return flag;
}

inline bool enabled() noexcept { return parallel_flag().load(); }
inline void set_enabled(bool on) noexcept { parallel_flag().store(on); }

inline int max_threads() noexcept {
#ifdef CANDUAL_HAS_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline std::int64_t chunk_begin(std::int64_t n, std::int64_t nc,
                                std::int64_t c) noexcept {
  return n * c / nc;
}

// sum_{i=0}^{n-1} f(i), chunk-deterministic as described above.
template <class F>
double deterministic_sum(std::int64_t n, F&& f) {
  if (n <= 0) return 0.0;
  const std::int64_t nc = n < kChunks ? n : kChunks;
  std::vector<double> partial(static_cast<std::size_t>(nc), 0.0);
#ifdef CANDUAL_HAS_OPENMP
#pragma omp parallel for schedule(static) if (enabled())
#endif
  for (std::int64_t c = 0; c < nc; ++c) {
    double acc = 0.0;
    const std::int64_t lo = chunk_begin(n, nc, c);
    const std::int64_t hi = chunk_begin(n, nc, c + 1);
    for (std::int64_t i = lo; i < hi; ++i) acc += f(i);
    partial[static_cast<std::size_t>(c)] = acc;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

struct ArgMin {
  std::int64_t index = -1;
  double value = 0.0;
};

// argmin_{i<n} f(i); ties resolve to the lowest index, so the result is exact
// and independent of chunking.
template <class F>
ArgMin deterministic_argmin(std::int64_t n, F&& f) {
  ArgMin best;
  if (n <= 0) return best;
  const std::int64_t nc = n < kChunks ? n : kChunks;
  std::vector<ArgMin> partial(static_cast<std::size_t>(nc));
#ifdef CANDUAL_HAS_OPENMP
#pragma omp parallel for schedule(static) if (enabled())
#endif
  for (std::int64_t c = 0; c < nc; ++c) {
    const std::int64_t lo = chunk_begin(n, nc, c);
    const std::int64_t hi = chunk_begin(n, nc, c + 1);
    ArgMin local{lo, f(lo)};
    for (std::int64_t i = lo + 1; i < hi; ++i) {
      const double v = f(i);
      if (v < local.value) {
        local.value = v;
        local.index = i;
      }
    }
    partial[static_cast<std::size_t>(c)] = local;
  }
  best = partial[0];
  for (std::size_t c = 1; c < partial.size(); ++c) {
    if (partial[c].value < best.value) best = partial[c];
  }
  return best;
}

// all_{i<n} pred(i); exact, order-independent.
template <class Pred>
bool deterministic_all(std::int64_t n, Pred&& pred) {
  if (n <= 0) return true;
  const std::int64_t nc = n < kChunks ? n : kChunks;
  std::vector<char> ok(static_cast<std::size_t>(nc), 1);
#ifdef CANDUAL_HAS_OPENMP
#pragma omp parallel for schedule(static) if (enabled())
#endif
  for (std::int64_t c = 0; c < nc; ++c) {
    const std::int64_t lo = chunk_begin(n, nc, c);
    const std::int64_t hi = chunk_begin(n, nc, c + 1);
    char acc = 1;
    for (std::int64_t i = lo; i < hi && acc; ++i) {
      if (!pred(i)) acc = 0;
    }
    ok[static_cast<std::size_t>(c)] = acc;
  }
  for (char v : ok) {
    if (!v) return false;
  }
  return true;
}

// Element-wise map into a preallocated buffer.
template <class F>
void parallel_for(std::int64_t n, F&& f) {
#ifdef CANDUAL_HAS_OPENMP
#pragma omp parallel for schedule(static) if (enabled())
#endif
  for (std::int64_t i = 0; i < n; ++i) f(i);
}

}  // namespace candual::par
