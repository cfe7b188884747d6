#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "rng.hpp"
#include "vec.hpp"

using dret::Rng;
using dret::Vec;

namespace {

Vec random_nonzero(Rng& rng, std::size_t n) {
  Vec v(n);
  do {
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
  } while (dret::norm(v) == 0.0);
  return v;
}

}  // namespace

TEST_SUITE("vec") {

TEST_CASE("dot hand examples") {
  CHECK(dret::dot({1, 0, 2}, {3, 1, 1}) == 5.0);
  CHECK(dret::dot({0, 0}, {7, -3}) == 0.0);
  CHECK(dret::dot({1, 2, 3}, {1, 2, 3}) == 14.0);
}

TEST_CASE("dot rejects mismatched and empty inputs") {
  CHECK_THROWS_AS(dret::dot({1, 2}, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(dret::dot({}, {}), std::invalid_argument);
}

TEST_CASE("cosine hand examples") {
  CHECK(dret::cosine({1, 0}, {1, 0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dret::cosine({1, 0}, {0, 1}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dret::cosine({1, 2}, {2, 4}) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cosine rejects zero-norm vectors") {
  CHECK_THROWS_AS(dret::cosine({0, 0}, {1, 0}), std::domain_error);
  CHECK_THROWS_AS(dret::cosine({1, 0}, {0, 0}), std::domain_error);
}

TEST_CASE("concat") {
  CHECK(dret::concat({1}, {2, 3}) == Vec{1, 2, 3});
  Vec global(320, 0.5);
  Vec local(100, -0.25);
  CHECK(dret::concat(global, local).size() == 420);
  CHECK_THROWS_AS(dret::concat({}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(dret::concat({1}, {}), std::invalid_argument);
}

TEST_CASE("cosine properties on seeded vectors") {
  Rng rng(1234);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + rng.index(24);
    Vec a = random_nonzero(rng, n);
    Vec b = random_nonzero(rng, n);

    // self similarity
    CHECK(std::abs(dret::cosine(a, a) - 1.0) <= 1e-9);
    // exact symmetry under the fixed accumulation order
    CHECK(dret::cosine(a, b) == dret::cosine(b, a));
    // bounded
    CHECK(std::abs(dret::cosine(a, b)) <= 1.0 + 1e-9);
    // positive-scale invariance
    double s = rng.uniform(0.1, 50.0);
    Vec sa(n);
    for (std::size_t i = 0; i < n; ++i) sa[i] = s * a[i];
    CHECK(std::abs(dret::cosine(sa, b) - dret::cosine(a, b)) <= 1e-7);
  }
}

TEST_CASE("validity checks") {
  CHECK(dret::all_finite({1.0, -2.0}));
  CHECK_FALSE(dret::all_finite({1.0, std::nan("")}));
  CHECK_THROWS_AS(dret::require_valid({}, "test"), std::invalid_argument);
  CHECK_THROWS_AS(dret::require_valid({1.0, INFINITY}, "test"), std::invalid_argument);
}

TEST_CASE("f32 rounding is idempotent") {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    double x = rng.uniform(-100.0, 100.0);
    double once = dret::f32_round(x);
    CHECK(dret::f32_round(once) == once);
  }
}

}  // TEST_SUITE
