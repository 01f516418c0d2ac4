#include <doctest.h>

#include "ristap/oracles.hpp"
#include "ristap/stap_model.hpp"
#include "test_helpers.hpp"

using namespace ristap;

TEST_SUITE_BEGIN("stap_model");

TEST_CASE("steering vectors") {
  const CVector a0 = steering_vector(0.0, 4);
  for (int n = 0; n < 4; ++n) CHECK(a0(n) == Complex(1.0, 0.0));

  const CVector a90 = steering_vector(kPi / 2, 2);
  CHECK(std::abs(a90(1) - Complex(-1.0, 0.0)) < 1e-12);

  // sin(pi/6) = 1/2 forces phases 0, -pi/2, -pi.
  const CVector a30 = steering_vector(kPi / 6, 3);
  CHECK(std::abs(a30(1) - Complex(0.0, -1.0)) < 1e-12);
  CHECK(std::abs(a30(2) - Complex(-1.0, 0.0)) < 1e-12);

  const CVector long25 = steering_vector(0.0, 25);
  CHECK(long25.size() == 25);
  for (int n = 0; n < 25; ++n) CHECK(std::abs(long25(n)) == doctest::Approx(1.0));

  // Conjugate symmetry in the angle.
  const CVector plus = steering_vector(0.7, 6);
  const CVector minus = steering_vector(-0.7, 6);
  CHECK((plus.conjugate() - minus).norm() < 1e-12);
}

TEST_CASE("shift matrix selection and bounds") {
  const RMatrix j0 = shift_matrix(0, 3, 5);
  CHECK(j0.leftCols(3) == RMatrix::Identity(3, 3));
  CHECK(j0.rightCols(2).norm() == 0.0);

  const RMatrix j1 = shift_matrix(1, 2, 4);
  CHECK(j1(0, 1) == 1.0);
  CHECK(j1(1, 2) == 1.0);
  CHECK(j1.sum() == 2.0);

  CHECK_THROWS_AS(shift_matrix(-1, 2, 4), std::invalid_argument);
  CHECK_THROWS_AS(shift_matrix(3, 2, 4), std::invalid_argument);

  // X * J places the pulse at the offset.
  Rng rng(3);
  CMatrix x(2, 2);
  x << rng.cgaussian(), rng.cgaussian(), rng.cgaussian(), rng.cgaussian();
  const CMatrix shifted = x * shift_matrix(1, 2, 4).cast<Complex>();
  CHECK(shifted.col(0).norm() == 0.0);
  CHECK((shifted.col(1) - x.col(0)).norm() < 1e-15);
  CHECK((shifted.col(2) - x.col(1)).norm() < 1e-15);
  CHECK(shifted.col(3).norm() == 0.0);
}

TEST_CASE("doppler phases") {
  const CVector d0 = doppler_phases(0.0, 5, 1e-3);
  for (int m = 0; m < 5; ++m) CHECK(d0(m) == Complex(1.0, 0.0));
  // f T = pi alternates sign.
  const CVector dpi = doppler_phases(kPi * 1000.0, 3, 1e-3);
  CHECK(std::abs(dpi(1) - Complex(-1.0, 0.0)) < 1e-12);
  CHECK(std::abs(dpi(2) - Complex(1.0, 0.0)) < 1e-12);
  Rng rng(5);
  const CVector dr = doppler_phases(rng.uniform(-1e4, 1e4), 8, 1e-3);
  for (int m = 0; m < 8; ++m) CHECK(std::abs(dr(m)) == doctest::Approx(1.0));
}

TEST_CASE("composite channels: structure at tiny size") {
  const ChannelSet ch = testing::tiny_channels(21);
  const StackedModel model(ch);
  Rng rng(22);
  const CVector phi = testing::random_cvector(rng, model.phi_dim());

  SUBCASE("reflections off means reflected paths vanish") {
    const CVector zero = CVector::Zero(model.phi_dim());
    for (const auto& p : model.target_paths()) {
      if (p.kind == 0) continue;
      CHECK(model.path_channel(p, zero).norm() == 0.0);
    }
  }
  SUBCASE("double bounce has rank one") {
    for (const auto& p : model.target_paths()) {
      if (p.kind != 3) continue;
      const CMatrix h = model.path_channel(p, phi);
      Eigen::JacobiSVD<CMatrix> svd(h);
      CHECK(svd.singularValues()(1) < 1e-12 * svd.singularValues()(0));
    }
  }
  SUBCASE("explicit product for the single-bounce path") {
    for (const auto& p : model.target_paths()) {
      if (p.kind != 1) continue;
      const CMatrix expect = p.alpha *
                             (model.b_target(p.ris).transpose() * phi.segment(0, 2)) *
                             model.bs_steering_target().transpose();
      CHECK((model.path_channel(p, phi) - expect).norm() < 1e-12 * expect.norm());
    }
  }
}

TEST_CASE("matrix-free operators equal dense assembly on tiny instances") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const ChannelSet ch = testing::tiny_channels(100 + seed);
    const StackedModel model(ch);
    REQUIRE(model.filter_dim() <= 2 * 2 * 6);
    Rng rng(200 + seed);
    const CVector x = testing::random_cvector(rng, model.waveform_dim());
    const CVector phi = testing::random_cvector(rng, model.phi_dim());

    const CMatrix ht = oracles::dense_target_operator(model, phi);
    const CMatrix hc = oracles::dense_clutter_operator(model, phi);
    const CVector yt_dense = ht * x;
    const CVector yc_dense = hc * x;
    CHECK((model.apply_target(x, phi) - yt_dense).norm() <= 1e-12 * yt_dense.norm());
    CHECK((model.apply_clutter(x, phi) - yc_dense).norm() <= 1e-12 * yc_dense.norm());

    // Adjoints against the same dense assembly.
    const CVector w = testing::random_cvector(rng, model.filter_dim());
    CHECK((model.adjoint_target(w, phi) - ht.adjoint() * w).norm() <=
          1e-12 * (ht.adjoint() * w).norm());
    CHECK((model.adjoint_clutter(w, phi) - hc.adjoint() * w).norm() <=
          1e-12 * (hc.adjoint() * w).norm());
  }
}

TEST_CASE("operator properties") {
  const ChannelSet ch = testing::tiny_channels(7);
  const StackedModel model(ch);
  Rng rng(8);
  const CVector phi = testing::random_cvector(rng, model.phi_dim());
  const CVector x1 = testing::random_cvector(rng, model.waveform_dim());
  const CVector x2 = testing::random_cvector(rng, model.waveform_dim());

  SUBCASE("linearity in the waveform") {
    const CVector lhs = model.apply_target(x1 + x2, phi);
    const CVector rhs = model.apply_target(x1, phi) + model.apply_target(x2, phi);
    CHECK((lhs - rhs).norm() < 1e-12 * rhs.norm());
  }
  SUBCASE("zero reflections reduce to the direct-only operator") {
    const CVector zero = CVector::Zero(model.phi_dim());
    CHECK((model.apply_target(x1, zero) - model.apply_target_direct(x1)).norm() < 1e-14);
    CHECK((model.apply_clutter(x1, zero) - model.apply_clutter_direct(x1)).norm() < 1e-14);
  }
  SUBCASE("clutter operator ignores target velocity") {
    ChannelSet ch2 = ch;
    for (auto& p : ch2.target_paths) p.doppler *= 3.0;
    const StackedModel model2(ch2);
    CHECK((model.apply_clutter(x1, phi) - model2.apply_clutter(x1, phi)).norm() == 0.0);
  }
  SUBCASE("no clutter means zero clutter echo") {
    const ChannelSet none = testing::tiny_channels(9, 2, 2, 2, 2, 1, 0);
    const StackedModel m0(none);
    CHECK(m0.apply_clutter(testing::random_cvector(rng, m0.waveform_dim()),
                           testing::random_cvector(rng, m0.phi_dim()))
              .norm() == 0.0);
  }
}

TEST_CASE("scnr basics") {
  const ChannelSet ch = testing::tiny_channels(31);
  const StackedModel model(ch);
  Rng rng(32);
  const CVector phi = testing::random_cvector(rng, model.phi_dim());
  const CVector x = testing::random_cvector(rng, model.waveform_dim());
  const CVector w = testing::random_cvector(rng, model.filter_dim());
  const Real sigma2 = 0.3;

  CHECK(model.scnr(CVector::Zero(model.waveform_dim()), phi, w, sigma2) == 0.0);
  // Scale invariance in the filter.
  const Complex c(0.7, -2.1);
  CHECK(model.scnr(x, phi, w, sigma2) ==
        doctest::Approx(model.scnr(x, phi, (c * w).eval(), sigma2)));
  CHECK_THROWS_AS(model.scnr(x, phi, CVector::Zero(model.filter_dim()), sigma2),
                  std::invalid_argument);

  // Matched filter with no clutter reduces to ||y_t||^2 / sigma^2.
  const ChannelSet none = testing::tiny_channels(33, 2, 2, 2, 2, 1, 0);
  const StackedModel m0(none);
  const CVector x0 = testing::random_cvector(rng, m0.waveform_dim());
  const CVector phi0 = testing::random_cvector(rng, m0.phi_dim());
  const CVector yt = m0.apply_target(x0, phi0);
  CHECK(m0.scnr(x0, phi0, yt, sigma2) == doctest::Approx(yt.squaredNorm() / sigma2));
}

TEST_SUITE_END();
