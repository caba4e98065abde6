#pragma once

#include "fmmcomm/kernels.hpp"

namespace fmmcomm::kernels {

namespace scalar {
void message_times(const LinearCost& cost, const double* bytes,
                   const double* extra_hops, double* out, std::size_t n);
void torus_distances(const std::int32_t* dims, std::size_t rank,
                     const std::int32_t* a, const std::int32_t* b,
                     std::int32_t* out, std::size_t n);
Extrema extrema(const double* x, std::size_t n);
double shifted_sum(const double* x, std::size_t n, double shift);
double squared_deviation_sum(const double* x, std::size_t n, double center);
}  // namespace scalar

#if defined(FMMCOMM_HAVE_AVX2)
namespace avx2 {
void message_times(const LinearCost& cost, const double* bytes,
                   const double* extra_hops, double* out, std::size_t n);
void torus_distances(const std::int32_t* dims, std::size_t rank,
                     const std::int32_t* a, const std::int32_t* b,
                     std::int32_t* out, std::size_t n);
Extrema extrema(const double* x, std::size_t n);
double shifted_sum(const double* x, std::size_t n, double shift);
double squared_deviation_sum(const double* x, std::size_t n, double center);
}  // namespace avx2
#endif

}  // namespace fmmcomm::kernels
