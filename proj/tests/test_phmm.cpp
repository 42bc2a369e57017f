#include "mvtraffic/phmm.hpp"

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "builders.hpp"

using namespace mvtraffic;

TEST_CASE("poisson pmf matches direct evaluation") {
  CHECK(poisson_pmf(0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
  CHECK(poisson_pmf(2, 2.0) == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-12));
  CHECK(poisson_pmf(3, 5.0) ==
        doctest::Approx(125.0 / 6.0 * std::exp(-5.0)).epsilon(1e-12));
  CHECK(poisson_pmf(0, 0.0) == 1.0);
  CHECK(poisson_pmf(4, 0.0) == 0.0);
}

TEST_CASE("poisson pmf stays finite far in the tail") {
  // k! overflows double at k = 171; the log-space form must not.
  const double p = poisson_pmf(300, 250.0);
  CHECK(std::isfinite(p));
  CHECK(p > 0.0);
  CHECK(p < 1.0);

  double sum = 0.0;
  for (long k = 0; k < 600; ++k) sum += poisson_pmf(k, 250.0);
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("poisson cdf is the pmf partial sum") {
  double sum = 0.0;
  for (long k = 0; k <= 7; ++k) {
    sum += poisson_pmf(k, 3.2);
    CHECK(poisson_cdf(k, 3.2) == doctest::Approx(sum).epsilon(1e-12));
  }
  CHECK_THROWS_AS((void)poisson_pmf(-1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS((void)poisson_cdf(-1, 1.0), std::invalid_argument);
}

TEST_CASE("window-adjusted duration law absorbs the tail at the edge") {
  const double mean = 1.7;
  const long N = 6;

  SUBCASE("interior durations are the plain pmf") {
    for (long k = 0; k < N - 1; ++k) {
      CHECK(dotted_duration(k, 0, N, mean) ==
            doctest::Approx(poisson_pmf(k, mean)).epsilon(1e-12));
    }
  }

  SUBCASE("the last admissible duration takes all remaining mass") {
    CHECK(dotted_duration(N - 1, 0, N, mean) ==
          doctest::Approx(1.0 - poisson_cdf(N - 2, mean)).epsilon(1e-12));
  }

  SUBCASE("the law is normalized at every window offset") {
    for (long n = 0; n < N; ++n) {
      double sum = 0.0;
      for (long k = 0; k <= N - n - 1; ++k) sum += dotted_duration(k, n, N, mean);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("a window of one GOP is certain") {
    CHECK(dotted_duration(0, N - 1, N, mean) == 1.0);
  }

  SUBCASE("out-of-range arguments throw") {
    CHECK_THROWS_AS((void)dotted_duration(-1, 0, N, mean), std::invalid_argument);
    CHECK_THROWS_AS((void)dotted_duration(N, 0, N, mean), std::invalid_argument);
    CHECK_THROWS_AS((void)dotted_duration(0, N, N, mean), std::invalid_argument);
  }
}

TEST_CASE("parameter-level duration wrapper checks the state") {
  Rng rng(3);
  const PhmmParams params = builders::random_params(rng, 2, 1, 3);
  const DurationContext ctx{1, 5};
  CHECK(dotted_duration(2, 0, ctx, params) ==
        doctest::Approx(poisson_pmf(2, params.lambda[0])).epsilon(1e-12));
  CHECK_THROWS_AS((void)dotted_duration(0, 2, ctx, params), std::invalid_argument);
}

TEST_CASE("duration table agrees with the scalar forms") {
  Rng rng(9);
  const PhmmParams params = builders::random_params(rng, 3, 1, 3);
  const long N = 7;
  const DurationTable table(params, N);
  for (int i = 0; i < 3; ++i) {
    for (long k = 0; k < N; ++k) {
      CHECK(table.pmf(i, k) == doctest::Approx(poisson_pmf(k, params.lambda[i])).epsilon(1e-12));
      CHECK(table.cdf(i, k) == doctest::Approx(poisson_cdf(k, params.lambda[i])).epsilon(1e-12));
    }
    for (long n = 0; n < N; ++n) {
      for (long k = 0; k <= N - n - 1; ++k) {
        CHECK(table.dotted(i, k, N - n - 1) ==
              doctest::Approx(dotted_duration(k, n, N, params.lambda[i])).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("well-formed parameters validate cleanly") {
  Rng rng(1);
  const PhmmParams params = builders::random_params(rng, 3, 2, 4);
  CHECK(validate_params(params).empty());
}

TEST_CASE("validation reports every kind of violation") {
  Rng rng(1);
  PhmmParams good = builders::random_params(rng, 3, 2, 4);

  PhmmParams p = good;
  p.pi[0] += 0.1;
  CHECK(!validate_params(p).empty());

  p = good;
  p.trans[1][1] = 0.2;
  CHECK(!validate_params(p).empty());

  p = good;
  p.trans[0][1] += 0.5;
  CHECK(!validate_params(p).empty());

  p = good;
  p.trans[2][0] = -0.1;
  CHECK(!validate_params(p).empty());

  p = good;
  p.lambda[1] = -2.0;
  CHECK(!validate_params(p).empty());

  p = good;
  p.emissions[0][1][2] += 0.05;
  CHECK(!validate_params(p).empty());

  p = good;
  p.emissions[2][0].pop_back();
  CHECK(!validate_params(p).empty());

  p = good;
  p.grid.positions[0].upper = p.grid.positions[0].lower;
  CHECK(!validate_params(p).empty());

  p = good;
  p.pi[0] = -0.25;
  p.lambda[2] = -1.0;
  CHECK(validate_params(p).size() >= 2);  // all violations, not just the first

  CHECK_THROWS_AS(p.require_valid(), std::invalid_argument);
}

TEST_CASE("a single state has an all-zero transition row") {
  Rng rng(2);
  PhmmParams p = builders::random_params(rng, 1, 1, 3);
  CHECK(p.trans == std::vector<std::vector<double>>{{0.0}});
  CHECK(validate_params(p).empty());

  p.trans[0][0] = 1.0;  // no self transitions, even for one state
  CHECK(!validate_params(p).empty());
}
