#include "mvtraffic/rng.hpp"

#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"

using mvtraffic::Rng;

TEST_CASE("same seed reproduces every sampler stream") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 200; ++i) {
    CHECK(a.uniform01() == b.uniform01());
    CHECK(a.poisson(3.7) == b.poisson(3.7));
    CHECK(a.normal() == b.normal());
    CHECK(a.gamma(2.5, 1.5) == b.gamma(2.5, 1.5));
  }
}

TEST_CASE("different seeds diverge") {
  Rng a(1);
  Rng b(2);
  int same = 0;
  for (int i = 0; i < 100; ++i) {
    if (a.next_u64() == b.next_u64()) ++same;
  }
  CHECK(same == 0);
}

TEST_CASE("derived child seeds are distinct and stable") {
  const auto s0 = Rng::derive_seed(7, 0);
  const auto s1 = Rng::derive_seed(7, 1);
  CHECK(s0 != s1);
  CHECK(s0 == Rng::derive_seed(7, 0));

  std::set<std::uint64_t> children;
  for (std::uint64_t i = 0; i < 1000; ++i) children.insert(Rng::derive_seed(123, i));
  CHECK(children.size() == 1000);
}

TEST_CASE("uniform01 stays in [0, 1)") {
  Rng rng(5);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("categorical follows the weights") {
  Rng rng(11);
  const std::vector<double> weights{1.0, 0.0, 3.0};
  std::vector<long> counts(3, 0);
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++counts[rng.categorical(weights)];
  CHECK(counts[1] == 0);
  CHECK(std::fabs(counts[0] / double(n) - 0.25) < 0.01);
  CHECK(std::fabs(counts[2] / double(n) - 0.75) < 0.01);

  CHECK_THROWS_AS((void)rng.categorical({0.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS((void)rng.categorical({1.0, -0.5}), std::invalid_argument);
}

TEST_CASE("poisson matches its first two moments") {
  Rng rng(17);
  const double mean = 6.5;
  const int n = 50000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k = static_cast<double>(rng.poisson(mean));
    sum += k;
    sum2 += k * k;
  }
  const double m = sum / n;
  const double var = sum2 / n - m * m;
  CHECK(std::fabs(m - mean) < 0.1);
  CHECK(std::fabs(var - mean) < 0.25);

  CHECK(rng.poisson(0.0) == 0);
  CHECK_THROWS_AS((void)rng.poisson(-1.0), std::invalid_argument);
}

TEST_CASE("poisson survives means past the exp underflow range") {
  Rng rng(23);
  const double mean = 1500.0;
  double sum = 0.0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) sum += static_cast<double>(rng.poisson(mean));
  CHECK(std::fabs(sum / n - mean) < 0.05 * mean);
}

TEST_CASE("gamma matches its first two moments") {
  Rng rng(31);
  const double shape = 144.0;
  const double rate = 0.4;
  const int n = 50000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.gamma(shape, rate);
    CHECK(x > 0.0);
    sum += x;
    sum2 += x * x;
  }
  const double m = sum / n;
  const double var = sum2 / n - m * m;
  CHECK(std::fabs(m - shape / rate) < 1.0);                  // mean 360
  CHECK(std::fabs(var - shape / (rate * rate)) < 30.0);      // var 900

  // The sub-one shape branch.
  double small_sum = 0.0;
  for (int i = 0; i < n; ++i) small_sum += rng.gamma(0.5, 2.0);
  CHECK(std::fabs(small_sum / n - 0.25) < 0.01);

  CHECK_THROWS_AS((void)rng.gamma(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)rng.gamma(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("normal matches its first two moments") {
  Rng rng(37);
  const int n = 50000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum2 += x * x;
  }
  CHECK(std::fabs(sum / n) < 0.02);
  CHECK(std::fabs(sum2 / n - 1.0) < 0.03);
}
