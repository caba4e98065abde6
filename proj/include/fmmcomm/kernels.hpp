#pragma once

// Batched arithmetic used by the cost model, the topology and the
// measurement statistics. Every kernel has a scalar reference implementation
// and, on x86-64, an AVX2 variant chosen at runtime. Setting the environment
// variable FMMCOMM_ISA=scalar pins the scalar path.
//
// message_times, torus_distances and extrema are bit-identical across
// variants. The two summations reassociate and agree to rounding only.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace fmmcomm::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view to_string(Isa isa);

/// time = fixed + bytes * per_byte + extra_hops * per_extra_hop
struct LinearCost {
  double fixed = 0.0;
  double per_byte = 0.0;
  double per_extra_hop = 0.0;
};

struct Extrema {
  double min = 0.0;
  double max = 0.0;
};

struct KernelTable {
  Isa isa;
  void (*message_times)(const LinearCost& cost, const double* bytes,
                        const double* extra_hops, double* out, std::size_t n);
  // a and b are dimension-major: coordinate d of point k is at [d * n + k].
  void (*torus_distances)(const std::int32_t* dims, std::size_t rank,
                          const std::int32_t* a, const std::int32_t* b,
                          std::int32_t* out, std::size_t n);
  Extrema (*extrema)(const double* x, std::size_t n);
  double (*shifted_sum)(const double* x, std::size_t n, double shift);
  double (*squared_deviation_sum)(const double* x, std::size_t n, double center);
};

const KernelTable& scalar_table();
/// nullptr when the variant was not compiled in.
const KernelTable* avx2_table();
bool cpu_supports(Isa isa);
/// Table for `isa` if compiled in and supported by this CPU, else nullptr.
const KernelTable* table_for(Isa isa);
/// Best supported table, honoring FMMCOMM_ISA. Resolved once.
const KernelTable& active();

void message_times(const LinearCost& cost, std::span<const double> bytes,
                   std::span<const double> extra_hops, std::span<double> out);

void torus_distances(std::span<const std::int32_t> dims,
                     std::span<const std::int32_t> a,
                     std::span<const std::int32_t> b,
                     std::span<std::int32_t> out);

Extrema extrema(std::span<const double> x);
double shifted_sum(std::span<const double> x, double shift);
double squared_deviation_sum(std::span<const double> x, double center);

}  // namespace fmmcomm::kernels
