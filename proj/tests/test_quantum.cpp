#include <gtest/gtest.h>

#include <numbers>

#include "parity/quantum.hpp"
#include "parity/random.hpp"

using namespace parity;

namespace {

ComplexMatrix scalar(Complex z) { return ComplexMatrix{{z}}; }

BoxProgram slit_program(unsigned m) {
  std::vector<std::vector<KrausList>> ops(m, std::vector<KrausList>(2));
  for (unsigned i = 0; i < m; ++i) {
    ops[i][0] = {scalar(1.0)};
    ops[i][1] = {scalar(0.0)};
  }
  return BoxProgram::local(m, 2, std::move(ops));
}

BoxProgram binary_phase_program(unsigned m) {
  std::vector<std::vector<KrausList>> ops(m, std::vector<KrausList>(2));
  for (unsigned i = 0; i < m; ++i) {
    ops[i][0] = {scalar(1.0)};
    ops[i][1] = {scalar(-1.0)};
  }
  return BoxProgram::local(m, 2, std::move(ops));
}

DensityState uniform_superposition(unsigned m) {
  const PathedHilbert h = PathedHilbert::single(m, 1);
  std::vector<Complex> ket(m, 1.0 / std::sqrt(static_cast<double>(m)));
  return DensityState::pure(h, ket);
}

double naive_born(const ComplexMatrix& effect, const ComplexMatrix& rho) {
  // Tr(effect * rho) through an explicit product, then the trace.
  const std::size_t n = rho.rows();
  ComplexMatrix prod(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) prod(i, j) += effect(i, k) * rho(k, j);
  return prod.trace().real();
}

ComplexMatrix sum_mdag_m(const KrausList& ms) {
  ComplexMatrix total(ms.front().rows(), ms.front().cols());
  for (const ComplexMatrix& m : ms) total += m.adjoint() * m;
  return total;
}

}  // namespace

TEST(PathedHilbert, DimensionsAndIndexing) {
  const PathedHilbert h(2, 3, {2, 1});
  EXPECT_EQ(h.dimension(), 6u * 3u);
  EXPECT_EQ(h.internal_dimension(), 2u);
  EXPECT_EQ(h.configurations(), 9u);
  for (std::size_t c = 0; c < h.configurations(); ++c)
    for (std::size_t full : h.block(c)) EXPECT_EQ(h.configuration_of(full), c);
  const std::vector<unsigned> paths{2, 1};
  const std::vector<unsigned> internal{1, 0};
  // system 1 most significant: (2*2 + 1) * 3 + (1*1 + 0)
  EXPECT_EQ(h.index(paths, internal), 16u);
}

TEST(PathedHilbert, EnforcesCap) {
  EXPECT_THROW(PathedHilbert(3, 8, {3, 3, 3}), DimensionCapError);
  EXPECT_NO_THROW(PathedHilbert(2, 8, {4, 2}));
  EXPECT_THROW(PathedHilbert(2, 3, {1}), DomainError);
}

TEST(DensityState, Validation) {
  const PathedHilbert h = PathedHilbert::single(2, 1);
  EXPECT_THROW(DensityState(h, ComplexMatrix{{0.5, 1.0}, {0.0, 0.5}}), InvariantError);
  EXPECT_THROW(DensityState(h, ComplexMatrix{{0.8, 0.0}, {0.0, 0.8}}), InvariantError);
  EXPECT_THROW(DensityState(h, ComplexMatrix::identity(3)), DomainError);
  const DensityState neg(h, ComplexMatrix{{1.2, 0.0}, {0.0, -0.2}});
  EXPECT_THROW(neg.validate_positive(), InvariantError);
}

TEST(ControlledChannel, SlitsProjectOutClosedPaths) {
  const PathedHilbert h = PathedHilbert::single(3, 1);
  const KrausList ms = controlled_channel(slit_program(3), DitString(2, {0, 1, 0}), h);
  ASSERT_EQ(ms.size(), 1u);
  const std::vector<Complex> diag{1, 0, 1};
  EXPECT_EQ(ms[0], ComplexMatrix::diagonal(diag));
}

TEST(ControlledChannel, PhaseBoxesGiveDiagonalUnitary) {
  const PathedHilbert h = PathedHilbert::single(2, 1);
  for (std::size_t i = 0; i < 4; ++i) {
    const DitString x = DitString::from_index(2, 2, i);
    const KrausList ms = controlled_channel(binary_phase_program(2), x, h);
    ASSERT_EQ(ms.size(), 1u);
    EXPECT_TRUE(ms[0].is_unitary(1e-15));
    for (std::size_t p = 0; p < 2; ++p) EXPECT_EQ(ms[0](p, p), Complex(x[p] == 0 ? 1.0 : -1.0, 0.0));
    EXPECT_EQ(ms[0](0, 1), Complex{});
  }
}

TEST(ControlledChannel, RandomProgramsAreCompletelyPositiveContractions) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const bool joint = seed % 2 == 1;
    const PathedHilbert h = joint ? PathedHilbert(2, 2, {2, 1}) : PathedHilbert::single(3, 2);
    const unsigned m = h.paths();
    const unsigned d = seed % 3 == 0 ? 3 : 2;
    const BoxProgram prog =
        joint ? random_joint_program(h, d, {1, 3, true}, seed) : random_local_program(m, d, {2, 3, true}, seed);
    const DitString x = DitString::from_index(d, m, seed % int_pow(d, m));
    const ComplexMatrix slack = ComplexMatrix::identity(h.dimension()) - sum_mdag_m(controlled_channel(prog, x, h));
    EXPECT_TRUE(slack.is_psd(1e-9)) << "seed " << seed;
  }
}

TEST(ControlledChannel, RejectsBadPrograms) {
  const PathedHilbert h = PathedHilbert::single(2, 1);
  std::vector<std::vector<KrausList>> grow(2, std::vector<KrausList>(2, KrausList{scalar(1.5)}));
  EXPECT_THROW(controlled_channel(BoxProgram::local(2, 2, grow), DitString(2, {0, 0}), h), InvariantError);
  std::vector<std::vector<KrausList>> wrong(2, std::vector<KrausList>(2, KrausList{ComplexMatrix::identity(2)}));
  EXPECT_THROW(controlled_channel(BoxProgram::local(2, 2, wrong), DitString(2, {0, 0}), h), DomainError);
  EXPECT_THROW(controlled_channel(slit_program(3), DitString(2, {0, 0, 0}), h), DomainError);
}

TEST(Evolve, PhaseFlipMakesMinusState) {
  const DensityState out = evolve(uniform_superposition(2), binary_phase_program(2), DitString(2, {0, 1}));
  const double h = 1.0 / std::numbers::sqrt2;
  const std::vector<Complex> minus{h, -h};
  EXPECT_LE(max_abs_diff(out.rho(), ComplexMatrix::projector(minus)), 1e-15);
}

TEST(Evolve, AllSlitsClosedGivesZero) {
  const DensityState out = evolve(uniform_superposition(3), slit_program(3), DitString(2, {1, 1, 1}));
  EXPECT_EQ(out.trace(), 0.0);
  EXPECT_EQ(out.rho().max_abs(), 0.0);
}

TEST(Evolve, UnitaryProgramPreservesTrace) {
  const PathedHilbert h = PathedHilbert::single(3, 2);
  Rng rng = make_rng(4);
  std::vector<std::vector<KrausList>> ops(3, std::vector<KrausList>(3));
  for (auto& box : ops)
    for (auto& list : box) list = {random_unitary(2, rng)};
  const BoxProgram prog = BoxProgram::local(3, 3, std::move(ops));
  const DensityState prep = random_state(h, 5, 3);
  for (const ComplexMatrix& rho : evolve_all(prep, prog)) EXPECT_NEAR(rho.trace().real(), 1.0, 1e-10);
}

TEST(Evolve, LossyProgramStaysValid) {
  const PathedHilbert h = PathedHilbert::single(3, 2);
  const DensityState prep = random_state(h, 6, 2);
  const BoxProgram prog = random_local_program(3, 2, {2, 2, true}, 7);
  for (std::size_t i = 0; i < 8; ++i) {
    const DensityState out = evolve(prep, prog, DitString::from_index(2, 3, i));
    EXPECT_LE(out.trace(), 1.0 + 1e-10);
    EXPECT_NO_THROW(out.validate_positive());
  }
}

TEST(ClassicalDephase, SuperpositionBecomesMixture) {
  const DensityState out = classical_dephase(uniform_superposition(2));
  const std::vector<Complex> half{0.5, 0.5};
  EXPECT_LE(max_abs_diff(out.rho(), ComplexMatrix::diagonal(half)), 1e-15);
}

TEST(ClassicalDephase, Idempotent) {
  const PathedHilbert h(2, 2, {2, 1});
  const DensityState once = classical_dephase(random_state(h, 8, 3));
  EXPECT_EQ(classical_dephase(once).rho(), once.rho());
  // Internal coherence inside a configuration block survives.
  bool internal_coherence = false;
  for (std::size_t c = 0; c < h.configurations(); ++c) {
    const auto& idx = h.block(c);
    if (std::abs(once.rho()(idx[0], idx[1])) > 1e-6) internal_coherence = true;
  }
  EXPECT_TRUE(internal_coherence);
}

TEST(ClassicalDephase, SingleParticleOrderAtMostOne) {
  const PathedHilbert h = PathedHilbert::single(3, 2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DensityState prep = classical_dephase(random_state(h, seed, 2));
    const auto dist = run_experiment(prep, random_local_program(3, 2, {2, 2, true}, seed + 50),
                                     random_povm(h, 2, seed + 60), 2, 3);
    EXPECT_LE(algebraic_order(dist, 1e-7), 1u);
  }
}

TEST(Measure, ComputationalBasisOnSuperposition) {
  const Povm povm{{ComplexMatrix{{1, 0}, {0, 0}}, ComplexMatrix{{0, 0}, {0, 1}}}};
  const auto p = measure(uniform_superposition(2), povm);
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[1], 0.5, 1e-15);
}

TEST(Measure, MatchesElementwiseContraction) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PathedHilbert h = seed % 2 ? PathedHilbert(2, 2, {2, 2}) : PathedHilbert::single(4, 3);
    ASSERT_LE(h.dimension(), 64u);
    const DensityState rho = random_state(h, seed, 3);
    const Povm povm = random_povm(h, 3, seed + 1);
    const auto p = measure(rho, povm);
    double total = 0.0;
    for (std::size_t b = 0; b < 3; ++b) {
      EXPECT_NEAR(p[b], naive_born(povm.effects[b], rho.rho()), 1e-12);
      EXPECT_GE(p[b], -1e-10);
      total += p[b];
    }
    EXPECT_NEAR(total, rho.trace(), 1e-9);
  }
}

TEST(Measure, ZeroStateAndFolding) {
  const PathedHilbert h = PathedHilbert::single(2, 1);
  const DensityState zero(h, ComplexMatrix(2, 2));
  const Povm povm{{ComplexMatrix{{1, 0}, {0, 0}}, ComplexMatrix{{0, 0}, {0, 1}}}};
  auto p = measure(zero, povm);
  EXPECT_EQ(p[0], 0.0);
  EXPECT_EQ(p[1], 0.0);
  fold_no_detection(p, zero.trace(), 0);
  EXPECT_EQ(p[0], 1.0);
  auto q = measure(zero, povm);
  fold_no_detection(q, zero.trace(), 1);
  EXPECT_EQ(q[1], 1.0);
  EXPECT_THROW(fold_no_detection(q, 0.0, 2), DomainError);
}

TEST(Povm, Validation) {
  EXPECT_THROW((Povm{{ComplexMatrix{{1, 0}, {0, 0}}}}).validate(), InvariantError);
  EXPECT_THROW((Povm{{ComplexMatrix{{1.5, 0}, {0, 1}}, ComplexMatrix{{-0.5, 0}, {0, 0}}}}).validate(), InvariantError);
  EXPECT_NO_THROW((Povm{{ComplexMatrix{{1, 0}, {0, 0}}, ComplexMatrix{{0, 0}, {0, 1}}}}).validate());
}

TEST(RunExperiment, BinaryPhaseEndToEnd) {
  const double h = 1.0 / std::numbers::sqrt2;
  const std::vector<Complex> plus{h, h}, minus{h, -h};
  const Povm povm{{ComplexMatrix::projector(plus), ComplexMatrix::projector(minus)}};
  const auto dist = run_experiment(uniform_superposition(2), binary_phase_program(2), povm, 2, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    const DitString x = DitString::from_index(2, 2, i);
    EXPECT_NEAR(dist(i, (x[0] + x[1]) % 2), 1.0, 1e-15);
  }
}

TEST(RunExperiment, SingleParticleThirdOrderVanishes) {
  const PathedHilbert h = PathedHilbert::single(3, 2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto dist = run_experiment(random_state(h, seed, 2), random_local_program(3, 2, {2, 2, true}, seed + 1),
                                     random_povm(h, 2, seed + 2), 2, 3);
    EXPECT_NEAR(interference_term(dist, GameSpec::unit(2, 3)), 0.0, 1e-7);
  }
}

TEST(RunExperiment, LossIsFoldedIntoConfiguredOutcome) {
  const double h = 1.0 / std::numbers::sqrt2;
  const std::vector<Complex> plus{h, h}, minus{h, -h};
  const Povm povm{{ComplexMatrix::projector(plus), ComplexMatrix::projector(minus)}};
  ExperimentOptions opt;
  opt.fold_outcome = 1;
  const auto dist = run_experiment(uniform_superposition(2), slit_program(2), povm, 2, 2, opt);
  // Both slits closed: nothing arrives, every run is reported as outcome 1.
  EXPECT_NEAR(dist(3, 1), 1.0, 1e-15);
  // One slit open: half the runs lose the particle.
  EXPECT_NEAR(dist(1, 1), 0.5 + 0.25, 1e-15);
}

TEST(RunExperiment, RejectsMismatchedPovm) {
  const Povm povm = random_povm(PathedHilbert::single(2, 1), 3, 1);
  EXPECT_THROW(run_experiment(uniform_superposition(2), binary_phase_program(2), povm, 2, 2), DomainError);
}

TEST(ModuloAverage, SingleParticleCollapseAtThreeBoxes) {
  const PathedHilbert h = PathedHilbert::single(3, 2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DensityState prep = random_state(h, seed, 2);
    const BoxProgram prog = random_local_program(3, 2, {2, 2, true}, seed + 9);
    const auto r0 = modulo_average_state(prep, prog, DitString::unit(2, 3), 0);
    const auto r1 = modulo_average_state(prep, prog, DitString::unit(2, 3), 1);
    EXPECT_LE(max_abs_diff(r0.rho(), r1.rho()), 1e-8);
    EXPECT_LE(r0.trace(), 1.0 + 1e-10);
  }
}

TEST(ModuloAverage, TwoBoxPhaseFamilyIsOrthogonal) {
  const auto avg = modulo_average_states(uniform_superposition(2), binary_phase_program(2), DitString::unit(2, 2));
  EXPECT_NEAR(naive_born(avg[0], avg[1]), 0.0, 1e-15);
  EXPECT_NEAR(avg[0].trace().real(), 1.0, 1e-15);
}

TEST(ModuloAverage, InputIndependentProgram) {
  const PathedHilbert h = PathedHilbert::single(2, 2);
  Rng rng = make_rng(3);
  const KrausList shared = random_kraus(2, 2, true, rng);
  std::vector<std::vector<KrausList>> ops(2, std::vector<KrausList>(3, shared));
  const BoxProgram prog = BoxProgram::local(2, 3, ops);
  const DensityState prep = random_state(h, 4, 2);
  const auto avg = modulo_average_states(prep, prog, DitString::unit(3, 2));
  const DensityState any = evolve(prep, prog, DitString(3, {2, 1}));
  for (const auto& a : avg) EXPECT_LE(max_abs_diff(a, any.rho()), 1e-14);
}

TEST(CollapseCheck, Examples) {
  const PathedHilbert h = PathedHilbert::single(3, 2);
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    EXPECT_TRUE(average_state_collapse_check(random_state(h, seed, 2),
                                             random_local_program(3, 2, {2, 2, true}, seed + 300),
                                             DitString::unit(2, 3), 1e-8));
  EXPECT_FALSE(average_state_collapse_check(uniform_superposition(2), binary_phase_program(2), DitString::unit(2, 2),
                                            1e-8));
  const PathedHilbert h2(2, 5, {2, 2});
  for (std::uint64_t seed = 0; seed < 3; ++seed)
    EXPECT_TRUE(average_state_collapse_check(random_state(h2, seed, 2), random_joint_program(h2, 2, {2, 1, true}, seed),
                                             DitString::unit(2, 5), 1e-7));
}

TEST(OrderCap, TopWeightDualsVanishBeyondTwiceTheSystems) {
  for (unsigned k : {1u, 2u})
    for (unsigned d : {2u, 3u}) {
      const unsigned m = 2 * k + 1;
      const PathedHilbert h(k, m, std::vector<unsigned>(k, k == 1 ? 2 : 1));
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const BoxProgram prog = k == 1 ? random_local_program(m, d, {2, 2, true}, seed)
                                       : random_joint_program(h, d, {1, 2, true}, seed);
        const auto dist = run_experiment(random_state(h, seed + 1, 2), prog, random_povm(h, d, seed + 2), d, m);
        const auto by_weight = max_dual_by_weight(fourier_spectrum(dist));
        EXPECT_LE(by_weight[m], 1e-7) << "k=" << k << " d=" << d;
        // The cap is tight: weight 2k survives.
        EXPECT_GT(by_weight[2 * k], 1e-6);
      }
    }
}

TEST(OrderCap, DephasingHalvesTheCap) {
  for (unsigned k : {1u, 2u})
    for (unsigned d : {2u, 3u}) {
      const unsigned m = 2 * k + 1;
      const PathedHilbert h(k, m, std::vector<unsigned>(k, k == 1 ? 2 : 1));
      for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const BoxProgram prog = k == 1 ? random_local_program(m, d, {2, 2, true}, seed)
                                       : random_joint_program(h, d, {1, 2, true}, seed);
        const DensityState prep = classical_dephase(random_state(h, seed + 1, 2));
        const auto dist = run_experiment(prep, prog, random_povm(h, d, seed + 2), d, m);
        const auto by_weight = max_dual_by_weight(fourier_spectrum(dist));
        for (unsigned w = k + 1; w <= m; ++w) EXPECT_LE(by_weight[w], 1e-7) << "k=" << k << " w=" << w;
      }
    }
}

TEST(PhaseWeightedSum, VanishesForSingleSystemsFromThreeBoxes) {
  for (unsigned d : {2u, 3u}) {
    const PathedHilbert h = PathedHilbert::single(3, 2);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const DensityState prep = random_state(h, seed, 2);
      const BoxProgram prog = random_local_program(3, d, {2, 2, true}, seed + 7);
      const DitString nu(d, {1, d - 1, 1});
      for (unsigned alpha = 1; alpha < d; ++alpha)
        EXPECT_LE(phase_weighted_state_sum(prep, prog, nu, alpha).max_abs(), 1e-8);
    }
  }
}

TEST(PhaseWeightedSum, SurvivesAtTwoBoxes) {
  const auto sum = phase_weighted_state_sum(uniform_superposition(2), binary_phase_program(2), DitString::unit(2, 2), 1);
  EXPECT_GT(sum.max_abs(), 0.5);
}
