#include "parity/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "parity/random.hpp"

namespace parity {
namespace {

constexpr double kSupportCutoff = 1e-10;

ComplexMatrix hermitize(const ComplexMatrix& a) {
  ComplexMatrix out = a + a.adjoint();
  out *= 0.5;
  return out;
}

ComplexMatrix scalar_op(Complex z) { return ComplexMatrix{{z}}; }

// Single-particle phase protocol on boxes (lo, lo + 1) of an m-box line:
// equal superposition of the two paths, phases omega^{-nu_lo x} and
// omega^{nu_hi x}. Other boxes act trivially.
BoxProgram phase_program(const DitString& nu) {
  const unsigned d = nu.modulus();
  const auto m = static_cast<unsigned>(nu.size());
  std::vector<std::vector<KrausList>> ops(m, std::vector<KrausList>(d));
  for (unsigned i = 0; i < m; ++i) {
    const long long sign = i % 2 == 0 ? -1 : 1;
    for (unsigned x = 0; x < d; ++x) ops[i][x] = {scalar_op(root_of_unity(d, sign * nu[i] * x))};
  }
  return BoxProgram::local(m, d, std::move(ops));
}

DensityState two_path_superposition(const PathedHilbert& hilbert, unsigned lo) {
  std::vector<Complex> ket(hilbert.dimension());
  ket[lo] = ket[lo + 1] = 1.0 / std::numbers::sqrt2;
  return DensityState::pure(hilbert, ket);
}

Povm equal_weight_pgm(const std::vector<ComplexMatrix>& family, unsigned fold_outcome) {
  const std::vector<double> weights(family.size(), 1.0 / static_cast<double>(family.size()));
  return pretty_good_measurement(family, weights, fold_outcome);
}

void require_nonzero_digits(const DitString& nu, const char* who) {
  if (nu.weight() != nu.size()) throw DomainError(std::string(who) + ": weights must be non-zero");
}

}  // namespace

ConditionalDistribution run_strategy(const Strategy& strategy, Execution exec) {
  ExperimentOptions options;
  options.fold_outcome = strategy.fold_outcome;
  options.exec = exec;
  return run_experiment(strategy.prep, strategy.program, strategy.povm, strategy.d, strategy.m, options);
}

Strategy dephased(const Strategy& strategy) {
  Strategy out = strategy;
  out.name += "_dephased";
  out.prep = classical_dephase(strategy.prep);
  return out;
}

Povm pretty_good_measurement(std::span<const ComplexMatrix> states, std::span<const double> weights,
                             unsigned fold_outcome) {
  if (states.empty()) throw DomainError("pretty_good_measurement: empty ensemble");
  if (states.size() != weights.size()) throw DomainError("pretty_good_measurement: one weight per state");
  if (fold_outcome >= states.size()) throw DomainError("pretty_good_measurement: fold outcome out of range");
  const std::size_t n = states.front().rows();
  ComplexMatrix sigma(n, n);
  for (std::size_t s = 0; s < states.size(); ++s) {
    if (states[s].rows() != n || states[s].cols() != n)
      throw DomainError("pretty_good_measurement: states of different dimensions");
    if (weights[s] < 0.0) throw DomainError("pretty_good_measurement: negative weight");
    sigma += weights[s] * states[s];
  }
  const HermitianEigen eig = hermitian_eigen(hermitize(sigma));
  const double cutoff = kSupportCutoff * std::max(1.0, eig.values.back());
  ComplexMatrix inv_sqrt(n, n);
  ComplexMatrix support(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double lambda = eig.values[j];
    if (lambda < -cutoff) throw InvariantError("pretty_good_measurement: ensemble average is not positive");
    if (lambda <= cutoff) continue;
    const double f = 1.0 / std::sqrt(lambda);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        const Complex outer = eig.vectors(r, j) * std::conj(eig.vectors(c, j));
        inv_sqrt(r, c) += f * outer;
        support(r, c) += outer;
      }
  }
  Povm povm;
  for (std::size_t s = 0; s < states.size(); ++s)
    povm.effects.push_back(hermitize(inv_sqrt * (weights[s] * states[s]) * inv_sqrt));
  povm.effects[fold_outcome] += ComplexMatrix::identity(n) - hermitize(support);
  return povm;
}

Povm pretty_good_measurement(std::span<const DensityState> states, std::span<const double> weights,
                             unsigned fold_outcome) {
  std::vector<ComplexMatrix> rhos;
  rhos.reserve(states.size());
  for (const DensityState& s : states) rhos.push_back(s.rho());
  return pretty_good_measurement(rhos, weights, fold_outcome);
}

Strategy binary_phase_strategy() {
  const PathedHilbert hilbert = PathedHilbert::single(2, 1);
  std::vector<std::vector<KrausList>> ops(2, std::vector<KrausList>(2));
  for (unsigned i = 0; i < 2; ++i)
    for (unsigned x = 0; x < 2; ++x) ops[i][x] = {scalar_op(x == 0 ? 1.0 : -1.0)};
  const double h = 1.0 / std::numbers::sqrt2;
  const std::vector<Complex> plus{h, h};
  const std::vector<Complex> minus{h, -h};
  Povm povm{{ComplexMatrix::projector(plus), ComplexMatrix::projector(minus)}};
  return Strategy{"binary_phase",
                  2,
                  2,
                  1,
                  two_path_superposition(hilbert, 0),
                  BoxProgram::local(2, 2, std::move(ops)),
                  std::move(povm),
                  {0, 1}};
}

Strategy dary_phase_strategy(unsigned d, const DitString& nu) {
  if (nu.modulus() != d || nu.size() != 2) throw DomainError("dary_phase_strategy: nu must be a length-2 string mod d");
  require_nonzero_digits(nu, "dary_phase_strategy");
  const PathedHilbert hilbert = PathedHilbert::single(2, 1);
  DensityState prep = two_path_superposition(hilbert, 0);
  BoxProgram program = phase_program(nu);
  Povm povm = equal_weight_pgm(modulo_average_states(prep, program, nu), 0);
  return Strategy{"dary_phase", d, 2, 1, std::move(prep), std::move(program), std::move(povm), {0, 1}};
}

Strategy paired_phase_strategy(const DitString& nu) {
  const unsigned d = nu.modulus();
  const auto m = static_cast<unsigned>(nu.size());
  if (m == 0 || m % 2 != 0) throw DomainError("paired_phase_strategy: needs an even number of boxes");
  require_nonzero_digits(nu, "paired_phase_strategy");
  const unsigned k = m / 2;
  const PathedHilbert hilbert(k, m, std::vector<unsigned>(k, 1));
  BoxProgram program = phase_program(nu);

  // Product preparation: system p in (|2p> + |2p+1>)/sqrt(2).
  std::vector<Complex> ket(hilbert.dimension());
  const double amp = std::pow(2.0, -0.5 * k);
  std::vector<unsigned> paths(k);
  const std::vector<unsigned> internal(k, 0);
  for (std::size_t choice = 0; choice < (std::size_t{1} << k); ++choice) {
    for (unsigned p = 0; p < k; ++p) paths[p] = 2 * p + ((choice >> p) & 1u);
    ket[hilbert.index(paths, internal)] = amp;
  }

  // Each particle's PGM on its own m-path space; Bob adds the k outcomes.
  const PathedHilbert one = PathedHilbert::single(m, 1);
  std::vector<Povm> local;
  for (unsigned p = 0; p < k; ++p) {
    std::vector<unsigned> sub(m, 0);
    sub[2 * p] = nu[2 * p];
    sub[2 * p + 1] = nu[2 * p + 1];
    local.push_back(
        equal_weight_pgm(modulo_average_states(two_path_superposition(one, 2 * p), program, DitString(d, sub)), 0));
  }
  Povm povm;
  povm.effects.assign(d, ComplexMatrix(hilbert.dimension(), hilbert.dimension()));
  const std::size_t tuples = int_pow(d, k);
  for (std::size_t t = 0; t < tuples; ++t) {
    const DitString c = DitString::from_index(d, k, t);
    ComplexMatrix term = ComplexMatrix::identity(1);
    unsigned b = 0;
    for (unsigned p = 0; p < k; ++p) {
      term = tensor_product(term, local[p].effects[c[p]]);
      b = (b + c[p]) % d;
    }
    povm.effects[b] += term;
  }

  std::vector<unsigned> boxes(m);
  for (unsigned i = 0; i < m; ++i) boxes[i] = i;
  return Strategy{"paired_phase", d, m, k, DensityState::pure(hilbert, ket), std::move(program), std::move(povm),
                  std::move(boxes)};
}

Strategy classical_counting_strategy(unsigned k, unsigned m, unsigned d, const DitString& nu, bool require_win) {
  if (k == 0 || m == 0) throw DomainError("classical_counting_strategy: need k >= 1 and m >= 1");
  if (nu.modulus() != d || nu.size() != m) throw DomainError("classical_counting_strategy: nu does not match (m, d)");
  require_nonzero_digits(nu, "classical_counting_strategy");
  if (require_win && m > k) throw DomainError("classical_counting_strategy: m > k cannot win deterministically");
  const PathedHilbert hilbert(k, m, std::vector<unsigned>(k, d));
  const unsigned used = std::min(k, m);

  std::vector<unsigned> paths(k);
  for (unsigned p = 0; p < k; ++p) paths[p] = p < m ? p : 0;
  std::vector<Complex> ket(hilbert.dimension());
  ket[hilbert.index(paths, std::vector<unsigned>(k, 0))] = 1.0;

  std::vector<std::vector<KrausList>> ops(m, std::vector<KrausList>(d));
  for (unsigned i = 0; i < m; ++i)
    for (unsigned x = 0; x < d; ++x) {
      ComplexMatrix shift(d, d);
      for (unsigned r = 0; r < d; ++r) shift((r + x) % d, r) = 1.0;
      ops[i][x] = {shift};
    }

  // Diagonal POVM: outcome of a basis state is sum_p nu_{path_p} r_p over the
  // first `used` systems.
  Povm povm;
  povm.effects.assign(d, ComplexMatrix(hilbert.dimension(), hilbert.dimension()));
  std::vector<unsigned> path(k);
  std::vector<unsigned> mark(k);
  for (std::size_t full = 0; full < hilbert.dimension(); ++full) {
    std::size_t t = full;
    for (unsigned p = k; p-- > 0;) {
      const std::size_t local = t % (static_cast<std::size_t>(m) * d);
      t /= static_cast<std::size_t>(m) * d;
      path[p] = static_cast<unsigned>(local / d);
      mark[p] = static_cast<unsigned>(local % d);
    }
    unsigned b = 0;
    for (unsigned p = 0; p < used; ++p) b = (b + nu[path[p]] * mark[p]) % d;
    povm.effects[b](full, full) = 1.0;
  }

  std::vector<unsigned> boxes(used);
  for (unsigned i = 0; i < used; ++i) boxes[i] = i;
  return Strategy{"classical_counting", d, m, k, DensityState::pure(hilbert, ket),
                  BoxProgram::local(m, d, std::move(ops)), std::move(povm), std::move(boxes)};
}

Strategy classical_counting_strategy(unsigned k, unsigned m, unsigned d) {
  return classical_counting_strategy(k, m, d, DitString::unit(d, m));
}

Strategy random_pgm_strategy(const DitString& nu, const RandomProgramOptions& options, std::uint64_t seed) {
  if (nu.weight() == 0) throw DomainError("random_pgm_strategy: nu must be non-zero");
  const unsigned d = nu.modulus();
  const auto m = static_cast<unsigned>(nu.size());
  Rng rng = make_rng(seed);
  const std::uint64_t prep_seed = rng();
  const std::uint64_t program_seed = rng();
  const PathedHilbert hilbert = PathedHilbert::single(m, options.internal_dim);
  DensityState prep = random_state(hilbert, prep_seed, 2);
  BoxProgram program = random_local_program(m, d, options, program_seed);
  Povm povm = equal_weight_pgm(modulo_average_states(prep, program, nu), 0);
  std::vector<unsigned> boxes;
  for (unsigned i = 0; i < m; ++i)
    if (nu[i] != 0) boxes.push_back(i);
  return Strategy{"random_pgm", d, m, 1, std::move(prep), std::move(program), std::move(povm), std::move(boxes)};
}

ConditionalDistribution compose_modulo_strategies(const ConditionalDistribution& a, std::span<const unsigned> a_boxes,
                                                  const ConditionalDistribution& b, std::span<const unsigned> b_boxes,
                                                  unsigned m_total) {
  for (unsigned i : a_boxes)
    if (std::find(b_boxes.begin(), b_boxes.end(), i) != b_boxes.end())
      throw DomainError("compose_modulo_strategies: box sets overlap");
  return product_distribution(a, a_boxes, b, b_boxes, m_total);
}

double additivity_lower_bound(double q_a, double q_b, unsigned d) {
  if (!is_prime(d)) throw DomainError("additivity_lower_bound: d must be prime");
  if (q_a < 0.0 || q_a > 1.0 || q_b < 0.0 || q_b > 1.0)
    throw DomainError("additivity_lower_bound: probabilities must lie in [0, 1]");
  const double dd = d;
  return q_a * q_b + (1.0 - q_a) * (1.0 - q_b) / (dd - 1.0) - 1.0 / dd;
}

WitnessResult particle_number_witness(const ConditionalDistribution& dist, double tol) {
  const FourierSpectrum spectrum = fourier_spectrum(dist);
  const unsigned d = dist.d();
  const double scale = std::pow(static_cast<double>(d), -0.5 * dist.m());
  WitnessResult out;
  for (std::size_t nu = 1; nu < dist.num_inputs(); ++nu) {
    const DitString digits = DitString::from_index(d, dist.m(), nu);
    std::uint32_t mask = 0;
    for (std::size_t i = 0; i < digits.size(); ++i)
      if (digits[i] != 0) mask |= 1u << i;
    double value = 0.0;
    for (unsigned b = 0; b < d; ++b) value = std::max(value, std::abs(spectrum.coefficients[nu * d + b]) * scale);
    double& slot = out.per_subset_evidence[mask];
    slot = std::max(slot, value);
    if (value > tol) out.detected_order = std::max(out.detected_order, static_cast<unsigned>(digits.weight()));
  }
  out.particle_lower_bound = (out.detected_order + 1) / 2;
  return out;
}

InterferenceReport build_report(const ConditionalDistribution& dist, bool with_witness, double witness_tol) {
  InterferenceReport report;
  report.m = dist.m();
  report.d = dist.d();
  const unsigned d = dist.d();
  const FourierSpectrum spectrum = fourier_spectrum(dist);
  const double scale = std::pow(static_cast<double>(d), -0.5 * dist.m());
  const Permutation identity = Permutation::identity(d);
  for (std::size_t nu = 1; nu < dist.num_inputs(); ++nu) {
    const DitString digits = DitString::from_index(d, dist.m(), nu);
    report.game_terms[nu] = modulo_win_probability(dist, digits, identity) - 1.0 / d;
    for (unsigned b = 0; b < d; ++b) report.dual_terms[{nu, b}] = spectrum.coefficients[nu * d + b] * scale;
  }
  report.algebraic_order = algebraic_order(spectrum);
  if (with_witness) report.witness_particles = particle_number_witness(dist, witness_tol).particle_lower_bound;
  return report;
}

std::vector<CompositionSample> composition_sweep(std::span<const unsigned> moduli, unsigned count, std::uint64_t seed,
                                                 const RandomProgramOptions& options) {
  if (moduli.empty()) throw DomainError("composition_sweep: no moduli");
  std::vector<CompositionSample> out(count, CompositionSample{2, DitString(2, {1, 1}), DitString(2, {1, 1}), 0, 0,
                                                              0.0, 0.0, 0.0, 0.0});
  constexpr unsigned kMaxAttempts = 200;
  std::vector<unsigned char> failed(count, 0);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(count); ++i) {
    const unsigned d = moduli[static_cast<std::size_t>(i) % moduli.size()];
    Rng rng = make_rng(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(i + 1));
    std::uniform_int_distribution<unsigned> digit(1, d - 1);
    auto draw = [&](DitString& nu, std::uint64_t& side_seed, double& q, ConditionalDistribution& dist) {
      for (unsigned attempt = 0; attempt < kMaxAttempts; ++attempt) {
        nu = DitString(d, {digit(rng), digit(rng)});
        side_seed = rng();
        dist = run_strategy(random_pgm_strategy(nu, options, side_seed));
        q = win_probability(dist, GameSpec(nu, Permutation::identity(d)));
        if (q > 1.0 / d + 1e-9) return true;
      }
      return false;
    };
    CompositionSample& s = out[static_cast<std::size_t>(i)];
    s.d = d;
    try {
    ConditionalDistribution dist_a = ConditionalDistribution::uniform(2, d);
    ConditionalDistribution dist_b = dist_a;
    if (!draw(s.nu_a, s.seed_a, s.q_a, dist_a) || !draw(s.nu_b, s.seed_b, s.q_b, dist_b)) {
      failed[static_cast<std::size_t>(i)] = 1;
      continue;
    }
    const std::vector<unsigned> a_boxes{0, 1};
    const std::vector<unsigned> b_boxes{2, 3};
    const ConditionalDistribution composed = compose_modulo_strategies(dist_a, a_boxes, dist_b, b_boxes, 4);
    const DitString nu(d, {s.nu_a[0], s.nu_a[1], s.nu_b[0], s.nu_b[1]});
    s.composed = interference_term(composed, GameSpec(nu, Permutation::identity(d)));
    s.bound = additivity_lower_bound(s.q_a, s.q_b, d);
    } catch (const std::exception&) {
      failed[static_cast<std::size_t>(i)] = 1;
    }
  }
  if (std::any_of(failed.begin(), failed.end(), [](unsigned char f) { return f != 0; }))
    throw InvariantError("composition_sweep: could not draw a strategy above chance");
  return out;
}

}  // namespace parity
