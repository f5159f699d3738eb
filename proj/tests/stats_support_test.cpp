#include <cmath>

#include "doctest.h"
#include "support/stats.hpp"

// The helper functions below back the goodness-of-fit gate, so they get
// checked against externally computed reference values before anything
// trusts them.

TEST_CASE("regularized incomplete gamma matches reference points") {
  CHECK(teststat::gammp(3.5, 2.2) ==
        doctest::Approx(0.2672769164361349).epsilon(1e-12));
  CHECK(teststat::gammp(0.5, 0.5) ==
        doctest::Approx(0.6826894921370859).epsilon(1e-12));
  CHECK(teststat::gammp(1.0, 1.0) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
  CHECK(teststat::gammp(2.0, 0.0) == 0.0);
  CHECK(teststat::gammp(4.0, 400.0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("chi squared quantiles match reference tables") {
  CHECK(teststat::chi2_quantile(0.95, 1) ==
        doctest::Approx(3.841458820694124).epsilon(1e-10));
  CHECK(teststat::chi2_quantile(0.99, 4) ==
        doctest::Approx(13.276704135987622).epsilon(1e-10));
  CHECK(teststat::chi2_quantile(0.5, 10) ==
        doctest::Approx(9.34181776559197).epsilon(1e-10));
  // Two-sided 3 sigma tail mass, the level used by the distribution gate.
  CHECK(teststat::chi2_quantile(1.0 - 0.0026997960632601866, 7) ==
        doctest::Approx(21.846581673015194).epsilon(1e-10));
  // Quantile and CDF invert each other.
  for (int dof : {1, 3, 8}) {
    const double q = teststat::chi2_quantile(0.9, dof);
    CHECK(teststat::chi2_cdf(q, dof) == doctest::Approx(0.9).epsilon(1e-10));
  }
}

TEST_CASE("poisson pmf sums to one and matches closed forms") {
  double total = 0.0;
  for (int k = 0; k < 60; ++k) total += teststat::poisson_pmf(k, 2.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(teststat::poisson_pmf(0, 2.0) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  CHECK(teststat::poisson_pmf(3, 2.0) ==
        doctest::Approx(std::exp(-2.0) * 8.0 / 6.0).epsilon(1e-14));
}
