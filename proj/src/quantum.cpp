#include "parity/quantum.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <string>

#include "parity/random.hpp"

namespace parity {
namespace {

ComplexMatrix gather_block(const ComplexMatrix& rho, const std::vector<std::size_t>& rows,
                           const std::vector<std::size_t>& cols) {
  ComplexMatrix out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = rho(rows[r], cols[c]);
  return out;
}

void scatter_block(ComplexMatrix& rho, const std::vector<std::size_t>& rows, const std::vector<std::size_t>& cols,
                   const ComplexMatrix& block) {
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) rho(rows[r], cols[c]) += block(r, c);
}

bool is_zero(const ComplexMatrix& m) {
  return std::all_of(m.data().begin(), m.data().end(), [](Complex z) { return z == Complex{}; });
}

// Non-zero (config, config') blocks of a state, gathered once and reused for
// every input.
struct BlockPlan {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<ComplexMatrix> blocks;
};

BlockPlan make_plan(const DensityState& state) {
  const PathedHilbert& h = state.hilbert();
  BlockPlan plan;
  for (std::size_t a = 0; a < h.configurations(); ++a)
    for (std::size_t c = 0; c < h.configurations(); ++c) {
      ComplexMatrix block = gather_block(state.rho(), h.block(a), h.block(c));
      if (is_zero(block)) continue;
      plan.pairs.emplace_back(a, c);
      plan.blocks.push_back(std::move(block));
    }
  return plan;
}

ComplexMatrix evolve_blocks(const PathedHilbert& h, const BlockPlan& plan, const BoxProgram& program,
                            const DitString& x) {
  std::vector<KrausList> kraus(h.configurations());
  std::vector<std::vector<bool>> nonzero(h.configurations());
  for (std::size_t c = 0; c < h.configurations(); ++c) {
    kraus[c] = program.configuration_kraus(h, c, x);
    for (const ComplexMatrix& b : kraus[c]) nonzero[c].push_back(!is_zero(b));
  }
  ComplexMatrix out(h.dimension(), h.dimension());
  for (std::size_t p = 0; p < plan.pairs.size(); ++p) {
    const auto [a, c] = plan.pairs[p];
    ComplexMatrix acc(h.internal_dimension(), h.internal_dimension());
    for (std::size_t s = 0; s < kraus[a].size(); ++s) {
      if (!nonzero[a][s] || !nonzero[c][s]) continue;
      acc += (kraus[a][s] * plan.blocks[p]) * kraus[c][s].adjoint();
    }
    scatter_block(out, h.block(a), h.block(c), acc);
  }
  return out;
}

ComplexMatrix evolve_dense(const ComplexMatrix& rho, const BoxProgram& program, const DitString& x,
                           const PathedHilbert& h) {
  ComplexMatrix out(h.dimension(), h.dimension());
  for (const ComplexMatrix& m : controlled_channel(program, x, h)) add_sandwich(m, rho, out);
  return out;
}

void check_sizes(const DensityState& prep, const BoxProgram& program) {
  if (program.boxes() != prep.hilbert().paths())
    throw DomainError("box program and state disagree on the number of boxes");
  program.check(prep.hilbert());
}

}  // namespace

PathedHilbert::PathedHilbert(unsigned k, unsigned m, std::vector<unsigned> internal_dims)
    : k_(k), m_(m), internal_dims_(std::move(internal_dims)) {
  if (k_ == 0 || m_ == 0) throw DomainError("PathedHilbert: need at least one system and one path");
  if (internal_dims_.size() != k_) throw DomainError("PathedHilbert: one internal dimension per system");
  dimension_ = 1;
  internal_dimension_ = 1;
  configurations_ = 1;
  for (unsigned dim : internal_dims_) {
    if (dim == 0) throw DomainError("PathedHilbert: internal dimension must be positive");
    dimension_ *= static_cast<std::size_t>(m_) * dim;
    internal_dimension_ *= dim;
    configurations_ *= m_;
    if (dimension_ > kMaxDimension)
      throw DimensionCapError("PathedHilbert: total dimension exceeds " + std::to_string(kMaxDimension));
  }
  blocks_.resize(configurations_);
  std::vector<unsigned> internal(k_);
  for (std::size_t c = 0; c < configurations_; ++c) {
    const std::vector<unsigned> paths = configuration(c);
    blocks_[c].reserve(internal_dimension_);
    for (std::size_t r = 0; r < internal_dimension_; ++r) {
      std::size_t t = r;
      for (unsigned p = k_; p-- > 0;) {
        internal[p] = static_cast<unsigned>(t % internal_dims_[p]);
        t /= internal_dims_[p];
      }
      blocks_[c].push_back(index(paths, internal));
    }
  }
}

PathedHilbert PathedHilbert::single(unsigned m, unsigned internal_dim) { return PathedHilbert(1, m, {internal_dim}); }

std::size_t PathedHilbert::index(std::span<const unsigned> paths, std::span<const unsigned> internal) const {
  std::size_t full = 0;
  for (unsigned p = 0; p < k_; ++p) full = full * (m_ * internal_dims_[p]) + paths[p] * internal_dims_[p] + internal[p];
  return full;
}

std::vector<unsigned> PathedHilbert::configuration(std::size_t config) const {
  std::vector<unsigned> paths(k_);
  for (unsigned p = k_; p-- > 0;) {
    paths[p] = static_cast<unsigned>(config % m_);
    config /= m_;
  }
  return paths;
}

std::size_t PathedHilbert::configuration_of(std::size_t full_index) const {
  std::vector<unsigned> paths(k_);
  for (unsigned p = k_; p-- > 0;) {
    const std::size_t local = full_index % (m_ * internal_dims_[p]);
    full_index /= m_ * internal_dims_[p];
    paths[p] = static_cast<unsigned>(local / internal_dims_[p]);
  }
  std::size_t config = 0;
  for (unsigned p = 0; p < k_; ++p) config = config * m_ + paths[p];
  return config;
}

DensityState::DensityState(PathedHilbert hilbert, ComplexMatrix rho) : hilbert_(std::move(hilbert)), rho_(std::move(rho)) {
  if (rho_.rows() != hilbert_.dimension() || rho_.cols() != hilbert_.dimension())
    throw DomainError("DensityState: matrix does not match the space dimension");
  if (!rho_.is_hermitian(kHermitianTol)) throw InvariantError("DensityState: operator is not Hermitian");
  const double tr = trace();
  if (tr > 1.0 + kTraceTol || tr < -kTraceTol) throw InvariantError("DensityState: trace out of [0,1]");
}

DensityState DensityState::pure(PathedHilbert hilbert, std::span<const Complex> ket) {
  return DensityState(std::move(hilbert), ComplexMatrix::projector(ket));
}

void DensityState::validate_positive(double tol) const {
  if (!rho_.is_psd(tol)) throw InvariantError("DensityState: operator is not positive semidefinite");
}

BoxProgram::BoxProgram(unsigned m, unsigned d, unsigned joint_k, std::vector<std::vector<KrausList>> ops)
    : m_(m), d_(d), joint_k_(joint_k), ops_(std::move(ops)) {
  if (d_ < 2 || !is_prime(d_)) throw DomainError("BoxProgram: d must be prime");
}

BoxProgram BoxProgram::local(unsigned m, unsigned d, std::vector<std::vector<KrausList>> ops) {
  return BoxProgram(m, d, 0, std::move(ops));
}

BoxProgram BoxProgram::joint(unsigned m, unsigned d, unsigned k, std::vector<std::vector<KrausList>> ops) {
  if (k == 0) throw DomainError("BoxProgram: joint program needs k >= 1");
  return BoxProgram(m, d, k, std::move(ops));
}

void BoxProgram::check(const PathedHilbert& hilbert) const {
  if (hilbert.paths() != m_) throw DomainError("BoxProgram: box count differs from path count");
  std::size_t op_dim = 0;
  std::size_t expect_outer = m_;
  std::size_t expect_inner = d_;
  if (is_joint()) {
    if (hilbert.systems() != joint_k_) throw DomainError("BoxProgram: joint program written for another k");
    op_dim = hilbert.internal_dimension();
    expect_outer = hilbert.configurations();
    expect_inner = int_pow(d_, joint_k_);
  } else {
    op_dim = hilbert.internal_dims()[0];
    for (unsigned dim : hilbert.internal_dims())
      if (dim != op_dim) throw DomainError("BoxProgram: local programs need equal internal dimensions");
  }
  if (ops_.size() != expect_outer) throw DomainError("BoxProgram: wrong number of boxes/configurations");
  for (const auto& per_input : ops_) {
    if (per_input.size() != expect_inner) throw DomainError("BoxProgram: wrong number of input values");
    for (const KrausList& list : per_input) {
      if (list.empty()) throw DomainError("BoxProgram: empty Kraus list (use a zero operator to block)");
      ComplexMatrix total(op_dim, op_dim);
      for (const ComplexMatrix& b : list) {
        if (b.rows() != op_dim || b.cols() != op_dim)
          throw DomainError("BoxProgram: Kraus operator does not act on the internal space");
        total += b.adjoint() * b;
      }
      const ComplexMatrix slack = ComplexMatrix::identity(op_dim) - total;
      if (!slack.is_psd(kCpTol)) throw InvariantError("BoxProgram: sum of B^dagger B exceeds the identity");
    }
  }
}

std::size_t BoxProgram::kraus_count(const PathedHilbert& hilbert) const {
  std::size_t longest = 0;
  for (const auto& per_input : ops_)
    for (const KrausList& list : per_input) longest = std::max(longest, list.size());
  return is_joint() ? longest : int_pow(longest, hilbert.systems());
}

KrausList BoxProgram::configuration_kraus(const PathedHilbert& hilbert, std::size_t config, const DitString& x) const {
  const std::vector<unsigned> paths = hilbert.configuration(config);
  const std::size_t count = kraus_count(hilbert);
  const std::size_t dim = hilbert.internal_dimension();
  KrausList out;
  out.reserve(count);
  if (is_joint()) {
    std::size_t tuple = 0;
    for (unsigned p = 0; p < joint_k_; ++p) tuple = tuple * d_ + x[paths[p]];
    const KrausList& list = ops_[config][tuple];
    for (std::size_t s = 0; s < count; ++s) out.push_back(s < list.size() ? list[s] : ComplexMatrix(dim, dim));
    return out;
  }
  const unsigned k = hilbert.systems();
  std::size_t longest = 1;
  while (int_pow(longest, k) < count) ++longest;
  for (std::size_t s = 0; s < count; ++s) {
    ComplexMatrix product = ComplexMatrix::identity(1);
    std::size_t t = s;
    std::vector<std::size_t> digits(k);
    for (unsigned p = k; p-- > 0;) {
      digits[p] = t % longest;
      t /= longest;
    }
    bool zero = false;
    for (unsigned p = 0; p < k && !zero; ++p) {
      const KrausList& list = ops_[paths[p]][x[paths[p]]];
      if (digits[p] >= list.size()) {
        zero = true;
        break;
      }
      product = tensor_product(product, list[digits[p]]);
    }
    out.push_back(zero ? ComplexMatrix(dim, dim) : std::move(product));
  }
  return out;
}

void Povm::validate() const {
  if (effects.empty()) throw InvariantError("Povm: no effects");
  const std::size_t n = effects.front().rows();
  ComplexMatrix total(n, n);
  for (const ComplexMatrix& e : effects) {
    if (e.rows() != n || e.cols() != n) throw DomainError("Povm: effects of different dimensions");
    if (!e.is_psd(kTol)) throw InvariantError("Povm: effect is not positive semidefinite");
    total += e;
  }
  if (max_abs_diff(total, ComplexMatrix::identity(n)) > kTol) throw InvariantError("Povm: effects do not sum to I");
}

KrausList controlled_channel(const BoxProgram& program, const DitString& x, const PathedHilbert& hilbert) {
  program.check(hilbert);
  if (x.size() != program.boxes() || x.modulus() != program.modulus())
    throw DomainError("controlled_channel: input string does not match the program");
  const std::size_t count = program.kraus_count(hilbert);
  KrausList full(count, ComplexMatrix(hilbert.dimension(), hilbert.dimension()));
  for (std::size_t c = 0; c < hilbert.configurations(); ++c) {
    const KrausList local = program.configuration_kraus(hilbert, c, x);
    const auto& idx = hilbert.block(c);
    for (std::size_t s = 0; s < count; ++s)
      for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t q = 0; q < idx.size(); ++q) full[s](idx[r], idx[q]) = local[s](r, q);
  }
  return full;
}

DensityState evolve(const DensityState& state, const BoxProgram& program, const DitString& x, Execution exec) {
  check_sizes(state, program);
  if (x.size() != program.boxes() || x.modulus() != program.modulus())
    throw DomainError("evolve: input string does not match the program");
  const PathedHilbert& h = state.hilbert();
  ComplexMatrix rho = exec == Execution::Serial ? evolve_dense(state.rho(), program, x, h)
                                                : evolve_blocks(h, make_plan(state), program, x);
  return DensityState(h, std::move(rho));
}

std::vector<ComplexMatrix> evolve_all(const DensityState& state, const BoxProgram& program, Execution exec) {
  check_sizes(state, program);
  const PathedHilbert& h = state.hilbert();
  const unsigned d = program.modulus();
  const unsigned m = program.boxes();
  const std::size_t n = int_pow(d, m);
  std::vector<ComplexMatrix> out(n);
  if (exec == Execution::Serial) {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = evolve_dense(state.rho(), program, DitString::from_index(d, m, i), h);
    return out;
  }
  const BlockPlan plan = make_plan(state);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(n); ++i)
    out[i] = evolve_blocks(h, plan, program, DitString::from_index(d, m, static_cast<std::size_t>(i)));
  return out;
}

DensityState classical_dephase(const DensityState& state) {
  const PathedHilbert& h = state.hilbert();
  ComplexMatrix rho(h.dimension(), h.dimension());
  std::vector<std::size_t> config(h.dimension());
  for (std::size_t i = 0; i < h.dimension(); ++i) config[i] = h.configuration_of(i);
  for (std::size_t i = 0; i < h.dimension(); ++i)
    for (std::size_t j = 0; j < h.dimension(); ++j)
      if (config[i] == config[j]) rho(i, j) = state.rho()(i, j);
  return DensityState(h, std::move(rho));
}

std::vector<double> measure(const ComplexMatrix& rho, const Povm& povm) {
  std::vector<double> probs;
  probs.reserve(povm.outcomes());
  for (const ComplexMatrix& e : povm.effects) {
    if (e.rows() != rho.rows()) throw DomainError("measure: POVM and state dimensions differ");
    const std::size_t n = rho.rows();
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) acc += (e(i, j) * rho(j, i)).real();
    probs.push_back(acc);
  }
  return probs;
}

std::vector<double> measure(const DensityState& state, const Povm& povm) { return measure(state.rho(), povm); }

void fold_no_detection(std::vector<double>& probs, double trace, unsigned fold_outcome) {
  if (fold_outcome >= probs.size()) throw DomainError("fold_no_detection: outcome out of range");
  probs[fold_outcome] += 1.0 - trace;
}

ConditionalDistribution run_experiment(const DensityState& prep, const BoxProgram& program, const Povm& povm,
                                       unsigned d, unsigned m, const ExperimentOptions& options) {
  if (program.modulus() != d || program.boxes() != m) throw DomainError("run_experiment: program is not (d, m)");
  if (povm.outcomes() != d) throw DomainError("run_experiment: POVM needs exactly d effects");
  if (povm.effects.front().rows() != prep.hilbert().dimension())
    throw DomainError("run_experiment: POVM acts on another space");
  check_sizes(prep, program);
  povm.validate();

  const PathedHilbert& h = prep.hilbert();
  const std::size_t n = int_pow(d, m);
  std::vector<double> table(n * d);
  std::atomic<bool> negative{false};
  auto one = [&](std::size_t i, const ComplexMatrix& rho) {
    std::vector<double> p = measure(rho, povm);
    for (double v : p)
      if (v < -1e-10) negative = true;
    fold_no_detection(p, rho.trace().real(), options.fold_outcome);
    std::copy(p.begin(), p.end(), table.begin() + static_cast<std::ptrdiff_t>(i * d));
  };
  if (options.exec == Execution::Serial) {
    for (std::size_t i = 0; i < n; ++i) one(i, evolve_dense(prep.rho(), program, DitString::from_index(d, m, i), h));
  } else {
    const BlockPlan plan = make_plan(prep);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
      const auto idx = static_cast<std::size_t>(i);
      one(idx, evolve_blocks(h, plan, program, DitString::from_index(d, m, idx)));
    }
  }
  if (negative) throw InvariantError("run_experiment: Born rule produced a negative probability");
  try {
    return ConditionalDistribution(m, d, std::move(table));
  } catch (const DomainError& e) {
    throw InvariantError(std::string("run_experiment: ") + e.what());
  }
}

std::vector<ComplexMatrix> modulo_average_states(const DensityState& prep, const BoxProgram& program,
                                                 const DitString& nu) {
  const unsigned d = program.modulus();
  const unsigned m = program.boxes();
  if (nu.modulus() != d || nu.size() != m) throw DomainError("modulo_average_states: nu does not match the program");
  if (nu.weight() == 0) throw DomainError("modulo_average_states: nu must be non-zero");
  const std::vector<ComplexMatrix> states = evolve_all(prep, program);
  const std::size_t dim = prep.hilbert().dimension();
  std::vector<ComplexMatrix> avg(d, ComplexMatrix(dim, dim));
  for (std::size_t i = 0; i < states.size(); ++i)
    avg[weighted_mod_sum(DitString::from_index(d, m, i), nu)] += states[i];
  const double norm = static_cast<double>(d) / static_cast<double>(states.size());
  for (ComplexMatrix& a : avg) a *= norm;
  return avg;
}

DensityState modulo_average_state(const DensityState& prep, const BoxProgram& program, const DitString& nu,
                                  unsigned s) {
  if (s >= program.modulus()) throw DomainError("modulo_average_state: class out of range");
  return DensityState(prep.hilbert(), modulo_average_states(prep, program, nu)[s]);
}

ComplexMatrix phase_weighted_state_sum(const DensityState& prep, const BoxProgram& program, const DitString& nu,
                                       unsigned alpha) {
  const unsigned d = program.modulus();
  const unsigned m = program.boxes();
  if (nu.modulus() != d || nu.size() != m) throw DomainError("phase_weighted_state_sum: nu does not match");
  const std::vector<ComplexMatrix> states = evolve_all(prep, program);
  const std::size_t dim = prep.hilbert().dimension();
  ComplexMatrix acc(dim, dim);
  for (std::size_t i = 0; i < states.size(); ++i) {
    const unsigned s = weighted_mod_sum(DitString::from_index(d, m, i), nu);
    acc += root_of_unity(d, static_cast<long long>(alpha) * s) * states[i];
  }
  return acc;
}

double average_state_spread(const DensityState& prep, const BoxProgram& program, const DitString& nu) {
  const std::vector<ComplexMatrix> avg = modulo_average_states(prep, program, nu);
  double spread = 0.0;
  for (std::size_t a = 0; a < avg.size(); ++a)
    for (std::size_t b = a + 1; b < avg.size(); ++b) spread = std::max(spread, max_abs_diff(avg[a], avg[b]));
  return spread;
}

bool average_state_collapse_check(const DensityState& prep, const BoxProgram& program, const DitString& nu,
                                  double tol) {
  return average_state_spread(prep, program, nu) <= tol;
}

BoxProgram random_local_program(unsigned m, unsigned d, const RandomProgramOptions& options, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::vector<std::vector<KrausList>> ops(m, std::vector<KrausList>(d));
  for (unsigned i = 0; i < m; ++i)
    for (unsigned x = 0; x < d; ++x) {
      const std::size_t count = 1 + rng() % std::max(1u, options.max_kraus);
      ops[i][x] = random_kraus(options.internal_dim, count, options.lossy, rng);
    }
  return BoxProgram::local(m, d, std::move(ops));
}

BoxProgram random_joint_program(const PathedHilbert& hilbert, unsigned d, const RandomProgramOptions& options,
                                std::uint64_t seed) {
  Rng rng = make_rng(seed);
  const std::size_t tuples = int_pow(d, hilbert.systems());
  std::vector<std::vector<KrausList>> ops(hilbert.configurations(), std::vector<KrausList>(tuples));
  for (auto& per_config : ops)
    for (KrausList& list : per_config) {
      const std::size_t count = 1 + rng() % std::max(1u, options.max_kraus);
      list = random_kraus(hilbert.internal_dimension(), count, options.lossy, rng);
    }
  return BoxProgram::joint(hilbert.paths(), d, hilbert.systems(), std::move(ops));
}

DensityState random_state(const PathedHilbert& hilbert, std::uint64_t seed, std::size_t rank) {
  Rng rng = make_rng(seed);
  return DensityState(hilbert, random_density(hilbert.dimension(), rank, rng));
}

Povm random_povm(const PathedHilbert& hilbert, unsigned d, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return Povm{random_povm_effects(hilbert.dimension(), d, rng)};
}

}  // namespace parity
