#include <gtest/gtest.h>

#include <limits>
#include <random>

#include "ctcsim/engine.hpp"
#include "ctcsim/errors.hpp"
#include "ctcsim/scenarios.hpp"
#include "support.hpp"

using namespace ctcsim;
using namespace ctcsim::testing;

namespace {

const Complex alpha(0.6, 0.0), beta(0.0, 0.8);

PureState input(const std::string& label) { return PureState::qubit(label, alpha, beta); }

Circuit simple_loop() {
  return build_circuit({ctc_channel("phi"), external_channel("psi", input("x"))},
                       {make_gate(GateKind::Swap, {"phi", "psi"})});
}

Circuit one_gate(GateKind k, std::vector<std::string> t, double angle = 0.0) {
  return build_circuit({ctc_channel("phi"), external_channel("psi", input("x"))},
                       {make_gate(k, std::move(t), angle)});
}

CVector vec2(Complex a, Complex b) {
  CVector v(2);
  v << a, b;
  return v;
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(a - b);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace

TEST(BellOutState, SimpleLoop) {
  auto s = bell_out_state(simple_loop());
  EXPECT_EQ(s.labels(), (std::vector<std::string>{"ref:phi", "phi", "psi"}));
  const double h = 1.0 / std::sqrt(2.0);
  CVector want = CVector::Zero(8);
  want(0) = h * alpha, want(6) = h * alpha, want(1) = h * beta, want(7) = h * beta;
  EXPECT_LT((s.amplitudes() - want).norm(), 1e-15);
}

TEST(BellOutState, TwoLoops) {
  auto c = build_circuit({ctc_channel("a"), ctc_channel("b")}, {});
  auto s = bell_out_state(c);
  EXPECT_EQ(s.labels(), (std::vector<std::string>{"ref:a", "a", "ref:b", "b"}));
  CVector want = CVector::Zero(16);
  want(0) = want(3) = want(12) = want(15) = 0.5;
  EXPECT_LT((s.amplitudes() - want).norm(), 1e-15);
  EXPECT_NEAR(s.norm(), 1.0, 1e-15);
}

TEST(BellOutState, NoLoopIsAnError) {
  auto c = build_circuit({external_channel("a")}, {});
  EXPECT_THROW(bell_out_state(c), NoCtcError);
  EXPECT_THROW(run_exact_bell(c), NoCtcError);
}

TEST(BellProjections, GrandfatherNot) {
  auto set = bell_projections(one_gate(GateKind::X, {"phi"}));
  EXPECT_NEAR(set.at("B").weight, 0.0, 1e-15);
  EXPECT_NEAR(set.at("-").weight, 0.0, 1e-15);
  EXPECT_NEAR(set.at("-N").weight, 0.0, 1e-15);
  EXPECT_LT((set.at("N").state.amplitudes() - vec2(alpha, beta)).norm(), 1e-15);
}

TEST(BellProjections, UnprovenProof) {
  auto set = bell_projections(one_gate(GateKind::CX, {"phi", "psi"}));
  EXPECT_LT((set.at("B").state.amplitudes() - (alpha + beta) / 2.0 * vec2(1, 1)).norm(), 1e-15);
  EXPECT_LT((set.at("-").state.amplitudes() - (alpha - beta) / 2.0 * vec2(1, -1)).norm(), 1e-15);
}

TEST(BellProjections, FaultyGunWeight) {
  for (double z : {0.0, 0.4, 1.3, 2.9}) {
    auto c = build_circuit({ctc_channel("phi")}, {make_gate(GateKind::Rot, {"phi"}, z)});
    EXPECT_NEAR(bell_projections(c).at("B").weight, std::pow(std::cos(z), 2), 1e-14);
  }
}

TEST(BellProjections, MatchBruteForceOracle) {
  std::mt19937 rng(21);
  for (int i = 0; i < 40; ++i) {
    auto c = random_circuit(rng);
    LoopBlocks lb(c);
    auto set = bell_projections(c);
    ASSERT_EQ(set.entries.size(), std::size_t{1} << (2 * c.ctc_count()));
    for (const auto& ls : all_bell_labels(c.ctc_count())) {
      const CVector want = bell_projection_oracle(lb, ls);
      const auto& got = set.at(join_labels(ls));
      EXPECT_LT((got.state.amplitudes() - want).norm(), 1e-12) << join_labels(ls);
      EXPECT_NEAR(got.weight, want.squaredNorm(), 1e-12);
    }
    EXPECT_NEAR(set.total_weight(), 1.0, 1e-12);
  }
}

TEST(ExactBell, SimpleLoop) {
  auto r = run_exact_bell(simple_loop());
  ASSERT_TRUE(r.N);
  EXPECT_NEAR(*r.N, 0.5, 1e-15);
  EXPECT_NEAR(r.Z, 0.25, 1e-15);
  const CVector psi = vec2(alpha, beta);
  EXPECT_LT(max_abs(r.rho.matrix() - psi * psi.adjoint()), 1e-15);
}

TEST(ExactBell, BellPhaseDropsOut) {
  // (|00> + e^{i t}|11>) reference pair on the simple loop.
  for (double t : {0.3, 1.7, -2.2}) {
    const double h = 1.0 / std::sqrt(2.0);
    CVector p = CVector::Zero(4);
    p(0) = h, p(3) = std::polar(h, t);
    auto r = run_reference_pair(simple_loop(), PureState({"r", "l"}, p));
    const CVector psi = vec2(alpha, beta);
    EXPECT_LT(max_abs(r.rho.matrix() - psi * psi.adjoint()), 1e-14);
  }
}

TEST(ExactBell, CnotGun) {
  auto r = run_exact_bell(one_gate(GateKind::CX, {"psi", "phi"}));
  EXPECT_NEAR(*r.N, std::abs(alpha), 1e-15);
  EXPECT_NEAR(r.rho.matrix()(0, 0).real(), 1.0, 1e-15);
}

TEST(ExactBell, ParadoxCarriesProjections) {
  try {
    run_exact_bell(one_gate(GateKind::X, {"phi"}));
    FAIL() << "expected ParadoxError";
  } catch (const ParadoxError& e) {
    ASSERT_NE(e.projections(), nullptr);
    EXPECT_NEAR(e.projections()->at("N").weight, 1.0, 1e-15);
  }
}

TEST(ExactBell, PerturbedGrandfather) {
  for (double eps : {1e-2, 1e-4}) {
    CMatrix x(2, 2);
    x << 0, 1, 1, 0;
    CMatrix m = (1 - eps) * x + eps * CMatrix::Identity(2, 2);
    auto c = build_circuit({ctc_channel("phi"), external_channel("psi", input("x"))},
                           {make_custom_gate(Operator(m, true), {"phi"})});
    auto r = run_exact_bell(c);
    EXPECT_NEAR(*r.N, eps, 1e-12);
    EXPECT_TRUE(r.perturbation);
  }
}

TEST(ExactBell, ToleranceIsConfigurable) {
  CMatrix x(2, 2);
  x << 0, 1, 1, 0;
  const double eps = 1e-5;  // N^2 = 1e-10
  CMatrix m = (1 - eps) * x + eps * CMatrix::Identity(2, 2);
  auto c = build_circuit({ctc_channel("phi")}, {make_custom_gate(Operator(m, true), {"phi"})});
  EXPECT_NEAR(run_exact_bell(c).Z, eps * eps, 1e-20);
  EngineOptions strict;
  strict.paradox_tolerance = 1e-9;
  EXPECT_THROW(run_exact_bell(c, strict), ParadoxError);
}

TEST(NoisyBell, MatchesOracleOnRandomCircuits) {
  std::mt19937 rng(22);
  for (int i = 0; i < 30; ++i) {
    auto c = random_circuit(rng);
    for (double l : {0.1, 0.5, 1.0}) {
      auto want = noisy_bell_oracle(c, l);
      auto r = run_noisy_bell(c, l);
      EXPECT_NEAR(r.Z, want.Z, 1e-12);
      EXPECT_LT(max_abs(r.rho.matrix() - want.rho), 1e-12);
      EXPECT_TRUE(r.rho.is_hermitian(1e-10));
      EXPECT_GT(r.rho.min_eigenvalue(), -1e-10);
      EXPECT_NEAR(r.rho.trace().real(), 1.0, 1e-10);
    }
  }
}

TEST(NoisyBell, SingleLoopPartitionFunction) {
  std::mt19937 rng(23);
  for (int i = 0; i < 20; ++i) {
    auto c = random_circuit(rng, {1, 1, 0, 3, 8});
    const double nb = bell_projections(c).at("B").weight;
    for (double l : {0.0, 0.3, 0.9}) {
      if ((1 - l) * nb + l / 4 < 1e-10) continue;
      EXPECT_NEAR(run_noisy_bell(c, l).Z, (1 - l) * nb + l / 4, 1e-12);
    }
  }
}

TEST(NoisyBell, FullNoiseWeightsEveryProjectionEqually) {
  auto r = run_noisy_bell(one_gate(GateKind::CRot, {"psi", "phi"}, 0.7), 1.0);
  for (double w : r.model_weights) EXPECT_NEAR(w, 0.25, 1e-15);
  EXPECT_NEAR(r.Z, 0.25, 1e-15);
}

TEST(NoisyBell, ZetaGun) {
  for (double z : {0.3, 1.1}) {
    for (double l : {0.2, 0.7}) {
      auto r = run_noisy_bell(one_gate(GateKind::CRot, {"psi", "phi"}, z), l);
      EXPECT_NEAR(r.Z, 1 - 0.75 * l - (1 - l) * std::norm(beta) * std::pow(std::sin(z), 2), 1e-14);
    }
  }
}

TEST(NoisyBell, TwoLoopInteraction) {
  auto c = build_circuit({ctc_channel("phi1"), ctc_channel("phi2"),
                          external_channel("psi", input("x"))},
                         {make_gate(GateKind::CX, {"phi1", "phi2"}),
                          make_gate(GateKind::CX, {"phi1", "psi"})});
  const CVector psi = vec2(alpha, beta), xpsi = vec2(beta, alpha);
  for (double l : {0.0, 0.2, 1.0}) {
    auto r = run_noisy_bell(c, l);
    EXPECT_NEAR(r.Z, 0.25 * std::pow(1 - l / 2, 2), 1e-12);
    CMatrix want = (4 - 3 * l) / (4 - 2 * l) * psi * psi.adjoint() +
                   l / (4 - 2 * l) * xpsi * xpsi.adjoint();
    EXPECT_LT(max_abs(r.rho.matrix() - want), 1e-12);
  }
}

TEST(NoisyBell, VanishingNoiseApproachesExact) {
  std::mt19937 rng(24);
  int checked = 0;
  for (int i = 0; i < 200 && checked < 20; ++i) {
    auto c = random_circuit(rng);
    if (bell_projections(c).entries.front().weight < 0.5) continue;
    ++checked;
    auto exact = run_exact_bell(c).rho.matrix();
    for (double l : {1e-3, 1e-4})
      EXPECT_LE(trace_distance(run_noisy_bell(c, l).rho.matrix(), exact), 10 * l);
  }
  EXPECT_GT(checked, 5);
}

TEST(NoisyBell, ParadoxOnlyWithoutNoise) {
  auto c = one_gate(GateKind::X, {"phi"});
  EXPECT_THROW(run_noisy_bell(c, 0.0), ParadoxError);
  EXPECT_NEAR(run_noisy_bell(c, 0.2).Z, 0.05, 1e-15);
}

TEST(Classical, MatchesEigenpairOracle) {
  std::mt19937 rng(25);
  for (int i = 0; i < 30; ++i) {
    auto c = random_circuit(rng);
    const std::size_t d = std::size_t{1} << c.ctc_count();
    for (double k : {0.1, 0.5, 0.9}) {
      Eigen::MatrixXd proj = Eigen::MatrixXd::Constant(d, d, k / (d - 1.0));
      proj.diagonal().setConstant(1 - k);
      Eigen::MatrixXd floor = Eigen::MatrixXd::Constant(d, d, k / d);
      floor.diagonal().array() += 1 - k;
      for (auto [omega, is_floor] : {std::pair{proj, false}, std::pair{floor, true}}) {
        auto want = eigenpair_oracle(c, omega);
        auto r = run_classical(c, k, is_floor);
        EXPECT_NEAR(r.Z, want.Z, 1e-12);
        EXPECT_LT(max_abs(r.rho.matrix() - want.rho), 1e-12);
      }
    }
  }
}

TEST(Classical, FloorIsRescaledProjective) {
  // The floor weights at k are the projective weights at k (d - 1) / d.
  std::mt19937 rng(26);
  for (int i = 0; i < 20; ++i) {
    auto c = random_circuit(rng);
    const double d = double(std::size_t{1} << c.ctc_count());
    for (double k : {0.2, 0.6}) {
      const double kp = k * (d - 1) / d;
      auto f = run_classical(c, k, true);
      auto p = run_classical(c, kp, false);
      EXPECT_NEAR(f.Z, p.Z, 1e-12);
      EXPECT_LT(max_abs(f.rho.matrix() - p.rho.matrix()), 1e-12);
    }
  }
}

TEST(Classical, ConventionsAgreeWhereOffDiagonalHistoriesVanish) {
  // The controlled phase flip only has diagonal histories.
  auto c = one_gate(GateKind::CZ, {"psi", "phi"});
  for (double k : {0.1, 0.4}) {
    EXPECT_LT(max_abs(run_classical(c, k, true).rho.matrix() -
                      run_classical(c, k, false).rho.matrix()),
              1e-15);
  }
}

TEST(Classical, ConventionsAgreeOnCatalogFloorCircuits) {
  // Every catalog circuit with a floor-convention expectation, at equal k.
  for (const auto& sc : catalog()) {
    bool uses_floor = false;
    for (const auto& e : sc.expectations) uses_floor |= e.family == ModelFamily::ClassicalFloor;
    if (!uses_floor) continue;
    auto c = sc.build(resolve_params(sc, {}));
    for (double k : {0.1, 0.3}) {
      EXPECT_LT(max_abs(run_classical(c, k, true).rho.matrix() -
                        run_classical(c, k, false).rho.matrix()),
                1e-12)
          << sc.name << " k=" << k;
    }
  }
}

TEST(Classical, BothBitsClassicalCnotGun) {
  auto c = one_gate(GateKind::CX, {"psi", "phi"});
  const double k = 0.3;
  auto r = run_input_mixture(c, "psi", {PureState::basis({"psi"}, 0), PureState::basis({"psi"}, 1)},
                             Classical{k, true});
  EXPECT_NEAR(r.rho.matrix()(0, 0).real(), (2 - k) / 2, 1e-15);
  EXPECT_NEAR(r.rho.matrix()(1, 1).real(), k / 2, 1e-15);
}

TEST(Classical, TwoQubitSimpleLoop) {
  std::mt19937 rng(27);
  auto gamma = random_state(rng, {"a", "b"});
  auto c = build_circuit({ctc_channel("p1"), ctc_channel("p2"), external_channel("q1"),
                          external_channel("q2")},
                         {make_gate(GateKind::Swap, {"p1", "q1"}),
                          make_gate(GateKind::Swap, {"p2", "q2"})},
                         {{{"q1", "q2"}, gamma}});
  const double k = 0.35;
  CMatrix want = k / 4 * CMatrix::Identity(4, 4);
  for (int i = 0; i < 4; ++i) want(i, i) += (1 - k) * std::norm(gamma.amplitude(i));
  EXPECT_LT(max_abs(run_classical(c, k, true).rho.matrix() - want), 1e-14);
}

namespace {

// At k = 1/2 the classical channel is unskewed, so Z should not depend on
// the inputs. Channels inside an entangled initializer are left alone.
void expect_unskewed(bool multi_loop) {
  for (const auto& name : list_scenarios()) {
    auto c = build_scenario(name);
    if ((c.ctc_count() > 1) != multi_loop) continue;
    std::mt19937 rng(28);
    const double z0 = run_classical(c, 0.5).Z;
    for (const auto& l : c.external_labels()) {
      bool grouped = false;
      for (const auto& e : c.entangled_inits())
        grouped |= std::count(e.channels.begin(), e.channels.end(), l) > 0;
      if (grouped) continue;
      auto changed = c.with_external_init(l, random_state(rng, {l}));
      EXPECT_NEAR(run_classical(changed, 0.5).Z, z0, 1e-12) << name << " " << l;
    }
  }
}

}  // namespace

TEST(Classical, UnskewedPointSingleLoopCatalog) { expect_unskewed(false); }

TEST(Classical, UnskewedPointMultiLoopCatalog) { expect_unskewed(true); }

TEST(Classical, UnskewedPointWithPerQubitWeights) {
  // Independent flips with k = 1/2 on every loop bit weigh all histories
  // equally, whatever the register size.
  std::mt19937 rng(35);
  for (int i = 0; i < 20; ++i) {
    auto c = random_circuit(rng, {2, 3, 1, 3, 8});
    const double z0 = run_weight_matrix(c, product_classical_weights(c.ctc_count(), 0.5)).Z;
    for (const auto& l : c.external_labels()) {
      auto changed = c.with_external_init(l, random_state(rng, {l}));
      EXPECT_NEAR(run_weight_matrix(changed, product_classical_weights(c.ctc_count(), 0.5)).Z, z0,
                  1e-12);
    }
  }
}

TEST(WeightMatrix, FlatMatchesUniformSum) {
  std::mt19937 rng(29);
  for (int i = 0; i < 20; ++i) {
    auto c = random_circuit(rng);
    const std::size_t d = std::size_t{1} << c.ctc_count();
    auto want = eigenpair_oracle(c, Eigen::MatrixXd::Ones(d, d));
    auto r = run_weight_matrix(c, flat_weights(d));
    EXPECT_LT(max_abs(r.rho.matrix() - want.rho), 1e-12);
    EXPECT_NEAR(r.Z, want.Z, 1e-12);
  }
}

TEST(WeightMatrix, ScaleIsIrrelevantAndRecorded) {
  std::mt19937 rng(30);
  auto c = random_circuit(rng, {1, 1, 1, 2, 6});
  auto a = run_weight_matrix(c, quad_weights(2));
  auto b = run_weight_matrix(c, 7.5 * quad_weights(2));
  EXPECT_LT(max_abs(a.rho.matrix() - b.rho.matrix()), 1e-14);
  EXPECT_NEAR(a.Z, b.Z, 1e-14);
  EXPECT_TRUE(a.metadata.count("weight_scale"));
}

TEST(WeightMatrix, DeltaOnSimpleLoopKeepsPopulations) {
  // The delta eigenpair sum keeps the diagonal histories only.
  auto r = run_weight_matrix(simple_loop(), delta_weights(2));
  CMatrix want = CMatrix::Zero(2, 2);
  want(0, 0) = std::norm(alpha), want(1, 1) = std::norm(beta);
  EXPECT_LT(max_abs(r.rho.matrix() - want), 1e-15);
}

TEST(WeightMatrix, SingleHistory) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(2, 2);
  w(1, 1) = 1.0;
  auto r = run_weight_matrix(simple_loop(), w);
  EXPECT_NEAR(r.rho.matrix()(1, 1).real(), 1.0, 1e-15);
}

TEST(WeightMatrix, Errors) {
  EXPECT_THROW(run_weight_matrix(simple_loop(), Eigen::MatrixXd::Zero(2, 2)), ConfigError);
  EXPECT_THROW(run_weight_matrix(simple_loop(), -flat_weights(2)), ConfigError);
  EXPECT_THROW(run_weight_matrix(simple_loop(), flat_weights(4)), ConfigError);
}

TEST(DeltaQuadrature, MatchesMomentFormulaOnRandomCircuits) {
  std::mt19937 rng(31);
  for (int i = 0; i < 20; ++i) {
    auto c = random_circuit(rng, {1, 1, 0, 3, 8});
    auto want = delta_moment_oracle(c);
    if (want.Z < 1e-9) continue;
    auto r = run_delta_quadrature(c);
    EXPECT_NEAR(r.Z, want.Z, 1e-8 * std::max(1.0, want.Z));
    EXPECT_LT(max_abs(r.rho.matrix() - want.rho), 1e-8);
    ASSERT_TRUE(r.rho_loop);
    EXPECT_NEAR(r.rho_loop->trace().real(), 1.0, 1e-10);
    EXPECT_TRUE(r.rho_loop->is_hermitian(1e-10));
  }
}

TEST(DeltaQuadrature, AgreesWithMonteCarlo) {
  std::mt19937 rng(32);
  for (int i = 0; i < 5; ++i) {
    auto c = random_circuit(rng, {1, 1, 1, 2, 6});
    auto mc = delta_monte_carlo(c, 200000, 100 + i);
    auto r = run_delta_quadrature(c);
    const double rounding = 2e5 * std::numeric_limits<double>::epsilon() * std::abs(mc.mean);
    EXPECT_LE(std::abs(r.Z - mc.mean), 3 * mc.stderr_ + rounding);
  }
}

TEST(DeltaQuadrature, PaperConstants) {
  EXPECT_NEAR(run_delta_quadrature(simple_loop()).Z, kPi * kPi, 1e-8);
  auto gf = run_delta_quadrature(one_gate(GateKind::X, {"phi"}));
  EXPECT_NEAR(gf.Z, kPi * kPi / 2, 1e-8);
  EXPECT_LT(max_abs(gf.rho_loop->matrix() - 0.5 * CMatrix::Identity(2, 2)), 1e-8);
  auto gun = run_delta_quadrature(one_gate(GateKind::CX, {"psi", "phi"}));
  EXPECT_NEAR(gun.Z, kPi * kPi / 2 * (3 * std::norm(alpha) + 1), 1e-8);
  EXPECT_LT(max_abs(gun.rho_loop->matrix() - 0.5 * CMatrix::Identity(2, 2)), 1e-8);
}

TEST(DeltaQuadrature, Errors) {
  auto two = build_circuit({ctc_channel("a"), ctc_channel("b")}, {});
  EXPECT_THROW(run_delta_quadrature(two), UnsupportedError);
  EXPECT_THROW(run_delta_quadrature(simple_loop(), 4, 64), ConfigError);
}

TEST(Conditional, PowerOffIsPlainEvolution) {
  auto c = build_circuit({ctc_channel("phi"), external_channel("psi", input("x")),
                          external_channel("p")},
                         {make_gate(GateKind::CX, {"psi", "phi"}),
                          make_gate(GateKind::CRot, {"phi", "psi"}, 0.4)});
  auto r = run_conditional(c, "p", NoisyBell{0.2}, ConditionalMode::Coupled);
  PureState evolved = evolve(c, bell_out_state(c));
  auto want = partial_trace(DensityOperator::pure(evolved), c.external_labels());
  EXPECT_LT(max_abs(r.rho.matrix() - want.matrix()), 1e-14);
}

TEST(Conditional, CoupledReducesToNoisyBellWhenAlwaysOn) {
  std::mt19937 rng(33);
  for (int i = 0; i < 10; ++i) {
    auto base = random_circuit(rng, {1, 2, 1, 2, 6});
    auto ch = base.channels();
    ch.push_back(external_channel("pw", PureState::basis({"pw"}, 1)));
    auto c = build_circuit(ch, base.gates(), base.entangled_inits());
    auto r = run_conditional(c, "pw", NoisyBell{0.3}, ConditionalMode::Coupled);
    auto plain = run_noisy_bell(c, 0.3);
    EXPECT_NEAR(r.Z, plain.Z, 1e-12);
    EXPECT_LT(max_abs(r.rho.matrix() - plain.rho.matrix()), 1e-12);
  }
}

TEST(Conditional, TouristTrapModes) {
  for (double ins : {0.0, 1.0}) {
    auto checks = verify_scenario("tourist_trap", {{"insulated", ins}}, ExactBell{});
    ASSERT_FALSE(checks.empty());
    for (const auto& c : checks) EXPECT_TRUE(c.passed) << c.detail;
  }
}

TEST(Conditional, PowerEntangledWithReferenceRejected) {
  auto c = build_circuit({ctc_channel("phi"), external_channel("p")},
                         {make_gate(GateKind::CX, {"phi", "p"})});
  EXPECT_THROW(run_conditional(c, "p", ExactBell{}, ConditionalMode::Coupled), ConfigError);
  EXPECT_THROW(run_conditional(c, "phi", ExactBell{}, ConditionalMode::Coupled), ConfigError);
  EXPECT_THROW(run_conditional(c, "p", Classical{0.1}, ConditionalMode::Coupled),
               UnsupportedError);
}

TEST(Models, Validation) {
  EXPECT_THROW(validate_model(NoisyBell{1.5}), ConfigError);
  EXPECT_THROW(validate_model(Classical{-0.1}), ConfigError);
  EXPECT_THROW(validate_model(DeltaQuadrature{7, 64}), ConfigError);
  EXPECT_NO_THROW(validate_model(WeightMatrix{flat_weights(2)}));
}

TEST(Models, EnvironmentTolerance) {
  setenv("CTC_SIM_TOLERANCE", "1e-6", 1);
  EXPECT_DOUBLE_EQ(EngineOptions::from_environment().paradox_tolerance, 1e-6);
  setenv("CTC_SIM_TOLERANCE", "garbage", 1);
  EXPECT_DOUBLE_EQ(EngineOptions::from_environment().paradox_tolerance,
                   kDefaultParadoxTolerance);
  unsetenv("CTC_SIM_TOLERANCE");
}

TEST(Results, DensityInvariantsOnRandomCircuits) {
  std::mt19937 rng(34);
  for (int i = 0; i < 30; ++i) {
    auto c = random_circuit(rng);
    const std::size_t d = std::size_t{1} << c.ctc_count();
    std::vector<CtcModel> models{NoisyBell{0.4}, Classical{0.3}, Classical{0.3, true},
                                 WeightMatrix{quad_weights(d)}};
    if (c.ctc_count() == 1) models.push_back(DeltaQuadrature{});
    for (const auto& m : models) {
      auto r = run(c, m);
      EXPECT_GE(r.Z, 0.0);
      EXPECT_TRUE(r.rho.is_hermitian(1e-10)) << model_name(m);
      EXPECT_GT(r.rho.min_eigenvalue(), -1e-10) << model_name(m);
      EXPECT_NEAR(r.rho.trace().real(), 1.0, 1e-10) << model_name(m);
      EXPECT_NEAR(partition_function(c, m), r.Z, 1e-12 * std::max(1.0, r.Z));
    }
  }
}
