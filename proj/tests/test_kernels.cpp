#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <vector>

#include "fmmcomm/error.hpp"
#include "fmmcomm/kernels.hpp"
#include "oracles.hpp"

using namespace fmmcomm;
using namespace fmmcomm::kernels;

namespace {

std::vector<double> random_doubles(std::size_t n, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = dist(rng);
  return v;
}

struct TorusBatch {
  std::vector<std::int32_t> dims, a, b;
  std::size_t n = 0;
};

TorusBatch random_batch(std::vector<std::int32_t> dims, std::size_t n, std::mt19937_64& rng) {
  TorusBatch t{dims, {}, {}, n};
  t.a.resize(dims.size() * n);
  t.b.resize(dims.size() * n);
  for (std::size_t d = 0; d < dims.size(); ++d) {
    std::uniform_int_distribution<std::int32_t> c(0, dims[d] - 1);
    for (std::size_t k = 0; k < n; ++k) {
      t.a[d * n + k] = c(rng);
      t.b[d * n + k] = c(rng);
    }
  }
  return t;
}

}  // namespace

TEST_CASE("scalar message times") {
  const LinearCost cost{4e-6, 2e-9, 3e-8};
  const std::vector<double> bytes{0, 1000, 46592};
  const std::vector<double> extra{0, 2, 7};
  std::vector<double> out(3);
  scalar_table().message_times(cost, bytes.data(), extra.data(), out.data(), 3);
  CHECK(out[0] == 4e-6);
  CHECK(out[1] == (4e-6 + 1000 * 2e-9) + 2 * 3e-8);
  CHECK(out[2] == (4e-6 + 46592 * 2e-9) + 7 * 3e-8);
}

TEST_CASE("scalar torus distances agree with the walking oracle") {
  std::mt19937_64 rng(7);
  for (const std::vector<std::int32_t>& dims :
       {std::vector<std::int32_t>{8, 4, 4}, {4, 4, 4, 4, 2}, {1, 3, 7}, {32, 16, 16}}) {
    const auto batch = random_batch(dims, 200, rng);
    std::vector<std::int32_t> out(batch.n);
    scalar_table().torus_distances(dims.data(), dims.size(), batch.a.data(), batch.b.data(),
                                   out.data(), batch.n);
    for (std::size_t k = 0; k < batch.n; ++k) {
      std::vector<int> a, b, e(dims.begin(), dims.end());
      for (std::size_t d = 0; d < dims.size(); ++d) {
        a.push_back(batch.a[d * batch.n + k]);
        b.push_back(batch.b[d * batch.n + k]);
      }
      CHECK(out[k] == oracle::walked_torus_distance(e, a, b));
    }
  }
}

TEST_CASE("scalar reductions") {
  const std::vector<double> x{3.0, -1.0, 4.0, 1.5};
  const auto e = scalar_table().extrema(x.data(), x.size());
  CHECK(e.min == -1.0);
  CHECK(e.max == 4.0);
  CHECK(scalar_table().shifted_sum(x.data(), x.size(), 1.0) == doctest::Approx(3.5));
  CHECK(scalar_table().squared_deviation_sum(x.data(), x.size(), 1.875) == 14.1875);
}

TEST_CASE("scalar squared deviations") {
  const std::vector<double> x{1.0, 3.0};
  CHECK(scalar_table().squared_deviation_sum(x.data(), 2, 2.0) == 2.0);
  CHECK(scalar_table().shifted_sum(x.data(), 2, 2.0) == 0.0);
  CHECK(scalar_table().shifted_sum(x.data(), 0, 2.0) == 0.0);
}

TEST_CASE("span wrappers check sizes") {
  const std::vector<double> three(3), two(2);
  std::vector<double> out(3);
  CHECK_THROWS_AS(message_times({}, three, two, out), Error);
  const std::vector<std::int32_t> dims{4, 4}, a(4), b(6);
  std::vector<std::int32_t> d(2);
  CHECK_THROWS_AS(torus_distances(dims, a, b, d), Error);
  const auto empty = extrema(std::span<const double>{});
  CHECK(empty.min == 0.0);
  CHECK(empty.max == 0.0);
}

TEST_CASE("dispatch") {
  CHECK(table_for(Isa::Scalar) == &scalar_table());
  CHECK(cpu_supports(Isa::Scalar));
  const char* env = std::getenv("FMMCOMM_ISA");
  if (env != nullptr && std::string(env) == "scalar") {
    CHECK(active().isa == Isa::Scalar);
  } else if (table_for(Isa::Avx2) != nullptr) {
    CHECK(active().isa == Isa::Avx2);
  }
  if (avx2_table() == nullptr) CHECK(table_for(Isa::Avx2) == nullptr);
}

TEST_CASE("AVX2 kernels match the scalar reference") {
  const KernelTable* simd = table_for(Isa::Avx2);
  if (simd == nullptr) {
    MESSAGE("AVX2 variant unavailable on this build or CPU; comparison skipped");
    return;
  }
  const KernelTable& ref = scalar_table();
  std::mt19937_64 rng(99);
  for (std::size_t n = 0; n <= 67; ++n) {
    CAPTURE(n);
    const LinearCost cost{5.33e-6, 1.32e-9 * 1.7, 134e-9 * 16};
    const auto bytes = random_doubles(n, rng, 0, 1e6);
    auto extra = random_doubles(n, rng, 0, 30);
    for (auto& e : extra) e = std::floor(e);
    std::vector<double> r(n), s(n);
    ref.message_times(cost, bytes.data(), extra.data(), r.data(), n);
    simd->message_times(cost, bytes.data(), extra.data(), s.data(), n);
    CHECK(r == s);

    for (const std::vector<std::int32_t>& dims :
         {std::vector<std::int32_t>{32, 16, 16}, {4, 4, 4, 4, 2}, {7, 1, 5}}) {
      const auto batch = random_batch(dims, n, rng);
      std::vector<std::int32_t> dr(n), ds(n);
      ref.torus_distances(dims.data(), dims.size(), batch.a.data(), batch.b.data(), dr.data(), n);
      simd->torus_distances(dims.data(), dims.size(), batch.a.data(), batch.b.data(), ds.data(), n);
      CHECK(dr == ds);
    }

    if (n > 0) {
      auto x = random_doubles(n, rng, -1e-3, 1e-3);
      const auto er = ref.extrema(x.data(), n);
      const auto es = simd->extrema(x.data(), n);
      CHECK(er.min == es.min);
      CHECK(er.max == es.max);
      const double center = x[n / 2];
      const double sr = ref.shifted_sum(x.data(), n, center);
      const double ss = simd->shifted_sum(x.data(), n, center);
      CHECK(std::abs(sr - ss) <= 1e-15 * n);
      const double qr = ref.squared_deviation_sum(x.data(), n, center);
      const double qs = simd->squared_deviation_sum(x.data(), n, center);
      CHECK(std::abs(qr - qs) <= 1e-12 * std::abs(qr) + 1e-300);
    }
  }
}
