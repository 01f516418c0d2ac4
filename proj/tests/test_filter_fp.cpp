#include <doctest.h>

#include "ristap/filter_fp.hpp"
#include "test_helpers.hpp"

using namespace ristap;

TEST_SUITE_BEGIN("filter_fp");

TEST_CASE("matched filter without clutter") {
  const ChannelSet ch = testing::tiny_channels(11, 2, 2, 2, 2, 1, 0);
  const StackedModel model(ch);
  Rng rng(12);
  const CVector x = testing::random_cvector(rng, model.waveform_dim());
  const CVector phi = testing::random_cvector(rng, model.phi_dim());
  const CVector yt = model.apply_target(x, phi);
  const CVector w = mvdr_filter(model, x, phi, 0.5);
  // Proportional to the target response (pick a well-populated entry; some
  // snapshot cells are empty by delay layout).
  Eigen::Index peak = 0;
  yt.cwiseAbs().maxCoeff(&peak);
  const Complex ratio = w(peak) / yt(peak);
  CHECK((w - ratio * yt).norm() < 1e-12 * w.norm());
}

TEST_CASE("rank-one inversion equals the dense solve") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ChannelSet ch = testing::tiny_channels(20 + seed);
    const StackedModel model(ch);
    REQUIRE(model.filter_dim() <= 64);
    Rng rng(40 + seed);
    const CVector x = testing::random_cvector(rng, model.waveform_dim());
    const CVector phi = testing::random_cvector(rng, model.phi_dim());
    const Real sigma2 = 0.1 + rng.uniform();
    const CVector yt = model.apply_target(x, phi);
    const CVector yc = model.apply_clutter(x, phi);

    const CMatrix cov = yc * yc.adjoint() + sigma2 * CMatrix::Identity(yt.size(), yt.size());
    const CVector dense_u = cov.ldlt().solve(yt);
    const CVector dense_w = dense_u / dense_u.squaredNorm();

    const CVector w = mvdr_filter(model, x, phi, sigma2);
    CHECK((w - dense_w).norm() <= 1e-10 * dense_w.norm());

    // Distortionless normalization from the closed form.
    const Complex gain = w.dot(yt);
    CHECK(std::abs(gain - dense_w.dot(yt)) < 1e-10 * std::abs(gain));
  }
}

TEST_CASE("minimum variance among equal-gain filters") {
  const ChannelSet ch = testing::tiny_channels(60);
  const StackedModel model(ch);
  Rng rng(61);
  const CVector x = testing::random_cvector(rng, model.waveform_dim());
  const CVector phi = testing::random_cvector(rng, model.phi_dim());
  const Real sigma2 = 0.25;
  const CVector yt = model.apply_target(x, phi);
  const CVector yc = model.apply_clutter(x, phi);
  const CVector w = mvdr_filter(model, x, phi, sigma2);

  auto output_variance = [&](const CVector& f) {
    return std::norm(f.dot(yc)) + sigma2 * f.squaredNorm();
  };
  const Complex gain = w.dot(yt);
  const Real var_mvdr = output_variance(w);
  for (int t = 0; t < 100; ++t) {
    CVector f = testing::random_cvector(rng, model.filter_dim());
    f *= gain / f.dot(yt);  // same target gain
    CHECK(output_variance(f) >= var_mvdr * (1.0 - 1e-10));
  }
}

TEST_CASE("mvdr maximizes the scnr") {
  const ChannelSet ch = testing::tiny_channels(70);
  const StackedModel model(ch);
  Rng rng(71);
  const CVector x = testing::random_cvector(rng, model.waveform_dim());
  const CVector phi = testing::random_cvector(rng, model.phi_dim());
  const Real sigma2 = 0.5;
  const CVector w = mvdr_filter(model, x, phi, sigma2);
  const Real best = model.scnr(x, phi, w, sigma2);
  // Random filters and the matched filter never beat it.
  for (int t = 0; t < 100; ++t) {
    const CVector f = testing::random_cvector(rng, model.filter_dim());
    CHECK(model.scnr(x, phi, f, sigma2) <= best * (1.0 + 1e-8));
  }
  CHECK(model.scnr(x, phi, model.apply_target(x, phi), sigma2) <= best * (1.0 + 1e-8));
}

TEST_CASE("ratio auxiliary") {
  const ChannelSet ch = testing::tiny_channels(80);
  const StackedModel model(ch);
  Rng rng(81);
  const CVector x = testing::random_cvector(rng, model.waveform_dim());
  const CVector phi = testing::random_cvector(rng, model.phi_dim());
  const CVector w = testing::random_cvector(rng, model.filter_dim());
  const Real sigma2 = 0.33;
  const Real eta = dinkelbach_eta(model, x, phi, w, sigma2);
  CHECK(eta == model.scnr(x, phi, w, sigma2));
  CHECK(dinkelbach_eta(model, CVector::Zero(model.waveform_dim()), phi, w, sigma2) == 0.0);

  // The ratio-to-difference transform vanishes exactly at its own level.
  const CVector yt = model.apply_target(x, phi);
  const CVector yc = model.apply_clutter(x, phi);
  const Real fp_value =
      std::norm(w.dot(yt)) - eta * (std::norm(w.dot(yc)) + sigma2 * w.squaredNorm());
  CHECK(std::abs(fp_value) < 1e-10 * std::norm(w.dot(yt)));

  CHECK_THROWS_AS(mvdr_filter(model, CVector::Zero(model.waveform_dim()), phi, sigma2),
                  std::invalid_argument);
}

TEST_SUITE_END();
