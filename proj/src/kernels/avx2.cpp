// Compiled with -mavx2. Only reached through the dispatch table after a CPU
// feature check. Keep this file free of inline library templates: a copy
// instantiated here could be picked by the linker for scalar callers.

#include <immintrin.h>

#include "variants.hpp"

namespace fmmcomm::kernels::avx2 {

namespace {

inline double min_of(double a, double b) { return b < a ? b : a; }
inline double max_of(double a, double b) { return a < b ? b : a; }

double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  const __m128d swapped = _mm_unpackhi_pd(pair, pair);
  return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

}  // namespace

void message_times(const LinearCost& cost, const double* bytes,
                   const double* extra_hops, double* out, std::size_t n) {
  const __m256d fixed = _mm256_set1_pd(cost.fixed);
  const __m256d per_byte = _mm256_set1_pd(cost.per_byte);
  const __m256d per_hop = _mm256_set1_pd(cost.per_extra_hop);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d transfer = _mm256_mul_pd(_mm256_loadu_pd(bytes + k), per_byte);
    const __m256d distance =
        _mm256_mul_pd(_mm256_loadu_pd(extra_hops + k), per_hop);
    _mm256_storeu_pd(out + k,
                     _mm256_add_pd(_mm256_add_pd(fixed, transfer), distance));
  }
  scalar::message_times(cost, bytes + k, extra_hops + k, out + k, n - k);
}

void torus_distances(const std::int32_t* dims, std::size_t rank,
                     const std::int32_t* a, const std::int32_t* b,
                     std::int32_t* out, std::size_t n) {
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    __m256i total = _mm256_setzero_si256();
    for (std::size_t d = 0; d < rank; ++d) {
      const __m256i extent = _mm256_set1_epi32(dims[d]);
      const __m256i va = _mm256_loadu_si256(
          reinterpret_cast<const __m256i*>(a + d * n + k));
      const __m256i vb = _mm256_loadu_si256(
          reinterpret_cast<const __m256i*>(b + d * n + k));
      const __m256i diff = _mm256_abs_epi32(_mm256_sub_epi32(va, vb));
      const __m256i wrapped = _mm256_sub_epi32(extent, diff);
      total = _mm256_add_epi32(total, _mm256_min_epi32(diff, wrapped));
    }
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + k), total);
  }
  // Tail: the scalar kernel expects its own dimension-major stride.
  for (; k < n; ++k) {
    std::int32_t total = 0;
    for (std::size_t d = 0; d < rank; ++d) {
      std::int32_t diff = a[d * n + k] - b[d * n + k];
      if (diff < 0) diff = -diff;
      const std::int32_t wrapped = dims[d] - diff;
      total += wrapped < diff ? wrapped : diff;
    }
    out[k] = total;
  }
}

Extrema extrema(const double* x, std::size_t n) {
  if (n < 4) return scalar::extrema(x, n);
  __m256d lo = _mm256_loadu_pd(x);
  __m256d hi = lo;
  std::size_t k = 4;
  for (; k + 4 <= n; k += 4) {
    const __m256d v = _mm256_loadu_pd(x + k);
    lo = _mm256_min_pd(lo, v);
    hi = _mm256_max_pd(hi, v);
  }
  alignas(32) double lanes_lo[4];
  alignas(32) double lanes_hi[4];
  _mm256_store_pd(lanes_lo, lo);
  _mm256_store_pd(lanes_hi, hi);
  Extrema e{lanes_lo[0], lanes_hi[0]};
  for (int l = 1; l < 4; ++l) {
    e.min = min_of(e.min, lanes_lo[l]);
    e.max = max_of(e.max, lanes_hi[l]);
  }
  for (; k < n; ++k) {
    e.min = min_of(e.min, x[k]);
    e.max = max_of(e.max, x[k]);
  }
  return e;
}

double shifted_sum(const double* x, std::size_t n, double shift) {
  const __m256d vshift = _mm256_set1_pd(shift);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_sub_pd(_mm256_loadu_pd(x + k), vshift));
    acc1 = _mm256_add_pd(acc1, _mm256_sub_pd(_mm256_loadu_pd(x + k + 4), vshift));
  }
  double sum = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) sum += x[k] - shift;
  return sum;
}

double squared_deviation_sum(const double* x, std::size_t n, double center) {
  const __m256d vcenter = _mm256_set1_pd(center);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(x + k), vcenter);
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(x + k + 4), vcenter);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(d1, d1));
  }
  double sum = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) {
    const double dev = x[k] - center;
    sum += dev * dev;
  }
  return sum;
}

}  // namespace fmmcomm::kernels::avx2
