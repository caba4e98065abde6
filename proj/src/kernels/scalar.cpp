#include <algorithm>
#include <cstdlib>

#include "variants.hpp"

namespace fmmcomm::kernels::scalar {

void message_times(const LinearCost& cost, const double* bytes,
                   const double* extra_hops, double* out, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double transfer = bytes[k] * cost.per_byte;
    const double distance = extra_hops[k] * cost.per_extra_hop;
    out[k] = (cost.fixed + transfer) + distance;
  }
}

void torus_distances(const std::int32_t* dims, std::size_t rank,
                     const std::int32_t* a, const std::int32_t* b,
                     std::int32_t* out, std::size_t n) {
  std::fill(out, out + n, 0);
  for (std::size_t d = 0; d < rank; ++d) {
    const std::int32_t extent = dims[d];
    const std::int32_t* ad = a + d * n;
    const std::int32_t* bd = b + d * n;
    for (std::size_t k = 0; k < n; ++k) {
      const std::int32_t diff = std::abs(ad[k] - bd[k]);
      out[k] += std::min(diff, extent - diff);
    }
  }
}

Extrema extrema(const double* x, std::size_t n) {
  if (n == 0) return {};
  Extrema e{x[0], x[0]};
  for (std::size_t k = 1; k < n; ++k) {
    e.min = std::min(e.min, x[k]);
    e.max = std::max(e.max, x[k]);
  }
  return e;
}

double shifted_sum(const double* x, std::size_t n, double shift) {
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) sum += x[k] - shift;
  return sum;
}

double squared_deviation_sum(const double* x, std::size_t n, double center) {
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double dev = x[k] - center;
    sum += dev * dev;
  }
  return sum;
}

}  // namespace fmmcomm::kernels::scalar
