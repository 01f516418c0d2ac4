#include <doctest.h>

#include "ristap/detection.hpp"

using namespace ristap;

TEST_SUITE_BEGIN("detection");

TEST_CASE("detector characteristic limits and domain") {
  // No signal: the detector fires exactly at the false-alarm rate.
  for (Real pfa : {1e-6, 1e-4, 1e-2, 0.5}) {
    CHECK(detection_probability(0.0, pfa) == doctest::Approx(pfa).epsilon(1e-9));
  }
  // Overwhelming signal: certain detection.
  CHECK(detection_probability(1e6, 1e-6) == doctest::Approx(1.0));
  CHECK_THROWS_AS(detection_probability(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(detection_probability(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(detection_probability(-0.5, 0.1), std::invalid_argument);
}

TEST_CASE("monotone in both arguments over a grid") {
  Real prev = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Real scnr = 0.1 * i;
    const Real pd = detection_probability(scnr, 1e-4);
    CHECK(pd >= prev);
    prev = pd;
  }
  prev = 0.0;
  for (int i = 1; i <= 100; ++i) {
    const Real pfa = static_cast<Real>(i) / 101.0;
    const Real pd = detection_probability(3.0, pfa);
    CHECK(pd >= prev);
    prev = pd;
  }
}

TEST_CASE("quantile inverts the tail probability") {
  for (Real p : {1e-8, 1e-4, 0.1, 0.5, 0.9, 1.0 - 1e-6}) {
    CHECK(gaussian_q(gaussian_q_inv(p)) == doctest::Approx(p).epsilon(1e-10));
  }
}

TEST_CASE("closed form matches the Monte Carlo detector") {
  // Unit-level check at modest trial counts; the acceptance suite runs 1e6.
  for (Real scnr : {0.5, 4.0}) {
    for (Real pfa : {1e-2, 1e-3}) {
      const Real pd = detection_probability(scnr, pfa);
      const Real mc = detection_probability_mc(scnr, pfa, 200000, 99);
      CHECK(std::abs(pd - mc) <= 0.01);
    }
  }
}

TEST_SUITE_END();
