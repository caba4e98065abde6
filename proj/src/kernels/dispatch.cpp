#include <cstdlib>
#include <stdexcept>
#include <string>

#include "fmmcomm/error.hpp"
#include "variants.hpp"

namespace fmmcomm::kernels {

namespace {

constexpr KernelTable kScalar{Isa::Scalar,
                              &scalar::message_times,
                              &scalar::torus_distances,
                              &scalar::extrema,
                              &scalar::shifted_sum,
                              &scalar::squared_deviation_sum};

#if defined(FMMCOMM_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::Avx2,
                            &avx2::message_times,
                            &avx2::torus_distances,
                            &avx2::extrema,
                            &avx2::shifted_sum,
                            &avx2::squared_deviation_sum};
#endif

const KernelTable& resolve() {
  const char* forced = std::getenv("FMMCOMM_ISA");
  if (forced != nullptr && std::string(forced) == "scalar") return kScalar;
  if (const KernelTable* t = table_for(Isa::Avx2)) return *t;
  return kScalar;
}

void require_same_size(std::size_t expected, std::size_t actual,
                       const char* what) {
  if (expected != actual) {
    throw Error(ErrorCode::InvalidArgument,
                std::string(what) + ": span sizes differ");
  }
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
  }
  return "unknown";
}

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(FMMCOMM_HAVE_AVX2)
  return &kAvx2;
#else
  return nullptr;
#endif
}

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* table_for(Isa isa) {
  if (!cpu_supports(isa)) return nullptr;
  switch (isa) {
    case Isa::Scalar: return &kScalar;
    case Isa::Avx2: return avx2_table();
  }
  return nullptr;
}

const KernelTable& active() {
  static const KernelTable& table = resolve();
  return table;
}

void message_times(const LinearCost& cost, std::span<const double> bytes,
                   std::span<const double> extra_hops, std::span<double> out) {
  require_same_size(bytes.size(), extra_hops.size(), "message_times");
  require_same_size(bytes.size(), out.size(), "message_times");
  active().message_times(cost, bytes.data(), extra_hops.data(), out.data(),
                         out.size());
}

void torus_distances(std::span<const std::int32_t> dims,
                     std::span<const std::int32_t> a,
                     std::span<const std::int32_t> b,
                     std::span<std::int32_t> out) {
  require_same_size(a.size(), b.size(), "torus_distances");
  require_same_size(a.size(), dims.size() * out.size(), "torus_distances");
  active().torus_distances(dims.data(), dims.size(), a.data(), b.data(),
                           out.data(), out.size());
}

Extrema extrema(std::span<const double> x) {
  return active().extrema(x.data(), x.size());
}

double shifted_sum(std::span<const double> x, double shift) {
  return active().shifted_sum(x.data(), x.size(), shift);
}

double squared_deviation_sum(std::span<const double> x, double center) {
  return active().squared_deviation_sum(x.data(), x.size(), center);
}

}  // namespace fmmcomm::kernels
