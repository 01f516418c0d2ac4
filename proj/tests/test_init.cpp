#include <doctest.h>

#include "ristap/init.hpp"
#include "test_helpers.hpp"

using namespace ristap;

TEST_SUITE_BEGIN("init");

TEST_CASE("phase ascent on a rank-one clutter-free landscape hits the closed form") {
  // Single surface, no clutter, and G built so the phi-side factor is exactly
  // b_vec * a_t^T; the optimum aligns each phase with conj(b_vec) and the
  // maximum has a closed form.
  ChannelSet ch = testing::tiny_channels(201, 2, 2, 2, 4, 1, 0);
  Rng rng(202);
  CVector b_vec(4);
  for (int i = 0; i < 4; ++i) b_vec(i) = rng.cgaussian();
  const CVector a_t = steering_vector(ch.theta_target, 2);
  const CVector b_steer = steering_vector(ch.theta_target_ris[0], 4);
  // diag(b_steer) G = b_vec a_t^T  =>  G = diag(b_steer)^-1 b_vec a_t^T
  ch.G[0] = b_steer.cwiseInverse().asDiagonal() * b_vec * a_t.transpose();

  const StackedModel model(ch);
  const RcgResult r = rcg_phase_init(model);

  const Real analytic = (1.0 + b_vec.cwiseAbs().sum()) * (1.0 + b_vec.cwiseAbs().sum()) *
                        static_cast<Real>(model.n_tx());
  CHECK(r.objective == doctest::Approx(analytic).epsilon(1e-6));
  // Phases align to the conjugate of the factor entries.
  for (int i = 0; i < 4; ++i) {
    const Complex expect = std::conj(b_vec(i)) / std::abs(b_vec(i));
    CHECK(std::abs(r.beta(i) - expect) < 1e-3);
  }
}

TEST_CASE("phase ascent is monotone and stays on the torus") {
  const ChannelSet ch = testing::tiny_channels(210);
  const StackedModel model(ch);
  const RcgResult r = rcg_phase_init(model);
  for (size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] >= r.trace[i - 1] - 1e-12);
  for (Eigen::Index j = 0; j < r.beta.size(); ++j) {
    CHECK(std::abs(std::abs(r.beta(j)) - 1.0) <= 1e-15);
  }
  const CVector phi0 = initial_phi(model, 3.0);
  for (Eigen::Index j = 0; j < phi0.size(); ++j) {
    CHECK(std::abs(phi0(j)) == doctest::Approx(3.0));
  }
}

TEST_CASE("waveform initialization: alignment and feasibility bookkeeping") {
  // One user, one slot: the worst-margin optimum phase-aligns every transmit
  // coordinate with the conjugate channel rotated onto the symbol.
  ChannelSet ch = testing::tiny_channels(220, 3, 1, 1, 2, 1, 1);
  ScenarioConfig cfg = testing::desk_config();
  cfg.n_users = 1;
  cfg.noise_power_user = 1e-4;
  cfg.qos_gamma = {2.0};
  const CommChannels comm(ch, cfg);
  const SymbolBlock block = generate_symbols(1, 1, 1, 4, 221);
  const CiConstraintSet ci(block, comm);
  Rng rng(222);
  const CVector phi0 = testing::random_cvector(rng, comm.phi_dim);

  const Real amplitude = 1.0;
  const InitXResult r = init_x(ci, phi0, amplitude);

  const CVector hk = comm.equivalent_channel(0, phi0);
  const Real expect_delta = std::sin(block.half_angle) * hk.cwiseAbs().sum() * amplitude;
  CHECK(r.delta == doctest::Approx(expect_delta).epsilon(5e-3));
  for (int j = 0; j < 3; ++j) {
    const Complex expect = amplitude * block.symbols(0, 0) * std::conj(hk(j)) / std::abs(hk(j));
    CHECK(std::abs(r.x(j) - expect) < 5e-2 * amplitude);
  }

  // Achieved level above every threshold means all margins start nonnegative.
  if (r.feasible) {
    CHECK(ci.margins_x(r.x, phi0).minCoeff() >= -1e-6);
  }
}

TEST_CASE("disc budget respected by the initial waveform") {
  const ChannelSet ch = testing::tiny_channels(230);
  ScenarioConfig cfg = testing::desk_config();
  cfg.n_users = 1;
  const CommChannels comm(ch, cfg);
  const SymbolBlock block = generate_symbols(1, ch.n_pulses, ch.n_slots, 4, 231);
  const CiConstraintSet ci(block, comm);
  Rng rng(232);
  const CVector phi0 = testing::random_cvector(rng, comm.phi_dim);
  const Real amplitude = 0.37;
  const InitXResult r = init_x(ci, phi0, amplitude);
  CHECK(r.x.cwiseAbs().maxCoeff() <= amplitude + 1e-7);
}

TEST_SUITE_END();
