#include <doctest.h>

#include <cmath>
#include <set>

#include "csmc/rng.hpp"

using namespace csmc;

TEST_SUITE_BEGIN("rng");

TEST_CASE("streams are reproducible and keyed") {
  RngStream a(42), b(42), c(43);
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t va = a.next_u64();
    CHECK(va == b.next_u64());
  }
  int differ = 0;
  RngStream a2(42);
  for (int i = 0; i < 100; ++i) differ += a2.next_u64() != c.next_u64();
  CHECK(differ > 90);
}

TEST_CASE("substreams do not disturb or repeat the parent") {
  RngStream parent(7);
  const RngStream child = parent.substream("pair", 3);
  RngStream parent2(7);
  for (int i = 0; i < 50; ++i) CHECK(parent.next_u64() == parent2.next_u64());

  // Derivation is a pure function of (key, tag, index)...
  CHECK(child.key() == parent.substream("pair", 3).key());
  // ...and distinct tags or indices give distinct keys.
  std::set<std::uint64_t> keys;
  for (std::uint64_t i = 0; i < 100; ++i) {
    keys.insert(parent.substream("pair", i).key());
    keys.insert(parent.substream("step", i).key());
  }
  CHECK(keys.size() == 200);
}

TEST_CASE("uniform01 lies strictly inside (0,1)") {
  RngStream rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform01();
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("inverse normal CDF reference values") {
  CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(inverse_normal_cdf(0.975) ==
        doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(inverse_normal_cdf(0.025) ==
        doctest::Approx(-1.959963984540054).epsilon(1e-12));
  CHECK(inverse_normal_cdf(0.9999) ==
        doctest::Approx(3.719016485455709).epsilon(1e-11));
  // Round trip through the CDF.
  for (double p : {1e-6, 1e-3, 0.2, 0.7, 0.999, 1.0 - 1e-7})
    CHECK(normal_cdf(inverse_normal_cdf(p)) == doctest::Approx(p).epsilon(1e-9));
}

TEST_CASE("normal() moments at one million draws") {
  RngStream rng(99);
  const int n = 1'000'000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::fabs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_SUITE_END();
