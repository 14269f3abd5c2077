#pragma once

// Exact density-operator simulation of k distinguishable systems, each with a
// path (which-box) factor and an internal factor, sent through m boxes whose
// Kraus operators are conditioned on the path.
//
// Basis ordering of the full space is (path_1 (x) internal_1) (x) ... (x)
// (path_k (x) internal_k), system 1 most significant. A "configuration" is the
// tuple of paths (i_1, ..., i_k), indexed with system 1 most significant; the
// composite internal index uses the same convention.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "parity/games.hpp"
#include "parity/kernels.hpp"
#include "parity/numkit.hpp"

namespace parity {

inline constexpr std::size_t kMaxDimension = 4096;

class PathedHilbert {
 public:
  PathedHilbert(unsigned k, unsigned m, std::vector<unsigned> internal_dims);
  static PathedHilbert single(unsigned m, unsigned internal_dim = 1);

  unsigned systems() const { return k_; }
  unsigned paths() const { return m_; }
  std::span<const unsigned> internal_dims() const { return internal_dims_; }

  std::size_t dimension() const { return dimension_; }
  std::size_t internal_dimension() const { return internal_dimension_; }
  std::size_t configurations() const { return configurations_; }

  /// Full basis index for path tuple `paths` and per-system internal levels.
  std::size_t index(std::span<const unsigned> paths, std::span<const unsigned> internal) const;
  /// Decodes a configuration index into the per-system paths.
  std::vector<unsigned> configuration(std::size_t config) const;
  /// Configuration of a full basis index.
  std::size_t configuration_of(std::size_t full_index) const;
  /// Full indices of the block (config, r) for r over the composite internal space.
  const std::vector<std::size_t>& block(std::size_t config) const { return blocks_[config]; }

  friend bool operator==(const PathedHilbert& a, const PathedHilbert& b) {
    return a.k_ == b.k_ && a.m_ == b.m_ && a.internal_dims_ == b.internal_dims_;
  }

 private:
  unsigned k_;
  unsigned m_;
  std::vector<unsigned> internal_dims_;
  std::size_t dimension_;
  std::size_t internal_dimension_;
  std::size_t configurations_;
  std::vector<std::vector<std::size_t>> blocks_;
};

/// Possibly sub-normalized density operator on a pathed space.
class DensityState {
 public:
  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;

  /// Checks shape, Hermiticity and trace <= 1. Positivity is checked by
  /// validate_positive(), which costs an eigendecomposition.
  DensityState(PathedHilbert hilbert, ComplexMatrix rho);
  static DensityState pure(PathedHilbert hilbert, std::span<const Complex> ket);

  const PathedHilbert& hilbert() const { return hilbert_; }
  const ComplexMatrix& rho() const { return rho_; }
  double trace() const { return rho_.trace().real(); }

  void validate_positive(double tol = kPsdFloor) const;

 private:
  PathedHilbert hilbert_;
  ComplexMatrix rho_;
};

using KrausList = std::vector<ComplexMatrix>;

/// Box actions. Either local: for each box i and input x, Kraus operators on a
/// single system's internal space (every system passing box i gets them), or
/// joint: for each path configuration (i_1..i_k) and inputs
/// (x_{i_1}..x_{i_k}), Kraus operators on the composite internal space.
class BoxProgram {
 public:
  static constexpr double kCpTol = 1e-9;

  /// local[i][x]
  static BoxProgram local(unsigned m, unsigned d, std::vector<std::vector<KrausList>> ops);
  /// joint[config][input tuple], tuple index with system 1 most significant.
  static BoxProgram joint(unsigned m, unsigned d, unsigned k, std::vector<std::vector<KrausList>> ops);

  unsigned boxes() const { return m_; }
  unsigned modulus() const { return d_; }
  bool is_joint() const { return joint_k_ != 0; }
  unsigned joint_systems() const { return joint_k_; }
  const std::vector<std::vector<KrausList>>& operators() const { return ops_; }

  /// Dimension and complete-positivity check against a space. Throws
  /// DomainError on shape problems, InvariantError when sum B^dagger B > I.
  void check(const PathedHilbert& hilbert) const;

  /// Common Kraus count across configurations (shorter lists are zero padded).
  std::size_t kraus_count(const PathedHilbert& hilbert) const;

  /// B^{(s)}_config(x) for every s, on the composite internal space.
  KrausList configuration_kraus(const PathedHilbert& hilbert, std::size_t config, const DitString& x) const;

 private:
  BoxProgram(unsigned m, unsigned d, unsigned joint_k, std::vector<std::vector<KrausList>> ops);

  unsigned m_;
  unsigned d_;
  unsigned joint_k_;
  std::vector<std::vector<KrausList>> ops_;
};

struct Povm {
  static constexpr double kTol = 1e-9;
  std::vector<ComplexMatrix> effects;

  std::size_t outcomes() const { return effects.size(); }
  /// Every effect PSD and the sum equal to the identity, within kTol.
  void validate() const;
};

/// M^{(s)}_x = sum_config |config><config| (x) B^{(s)}_config(x) on the full space.
KrausList controlled_channel(const BoxProgram& program, const DitString& x, const PathedHilbert& hilbert);

/// rho_x = sum_s M_s rho M_s^dagger. The default path works block by block on
/// the path configurations; Execution::Serial builds the full controlled
/// channel and multiplies densely (reference implementation).
DensityState evolve(const DensityState& state, const BoxProgram& program, const DitString& x,
                    Execution exec = Execution::Parallel);

/// rho_x for every input in enumeration order. Parallel over inputs.
std::vector<ComplexMatrix> evolve_all(const DensityState& state, const BoxProgram& program,
                                      Execution exec = Execution::Parallel);

/// Removes coherence between different path configurations.
DensityState classical_dephase(const DensityState& state);

/// Raw Born probabilities Tr(Pi_b rho). Their sum is Tr(rho).
std::vector<double> measure(const DensityState& state, const Povm& povm);
std::vector<double> measure(const ComplexMatrix& rho, const Povm& povm);

/// Adds the no-detection deficit 1 - trace to `fold_outcome`.
void fold_no_detection(std::vector<double>& probs, double trace, unsigned fold_outcome);

struct ExperimentOptions {
  unsigned fold_outcome = 0;
  Execution exec = Execution::Parallel;
};

/// Full table P(b|x) over all d^m inputs.
ConditionalDistribution run_experiment(const DensityState& prep, const BoxProgram& program, const Povm& povm,
                                       unsigned d, unsigned m, const ExperimentOptions& options = {});

/// rho^{(S)} = d^{1-m} sum_{x : s_{x,nu} = S} rho_x for S = 0..d-1.
std::vector<ComplexMatrix> modulo_average_states(const DensityState& prep, const BoxProgram& program,
                                                 const DitString& nu);
DensityState modulo_average_state(const DensityState& prep, const BoxProgram& program, const DitString& nu,
                                  unsigned s);

/// sum_x omega^{alpha nu.x} rho_x.
ComplexMatrix phase_weighted_state_sum(const DensityState& prep, const BoxProgram& program, const DitString& nu,
                                       unsigned alpha);

/// max_{S,S'} || rho^{(S)} - rho^{(S')} ||_max
double average_state_spread(const DensityState& prep, const BoxProgram& program, const DitString& nu);
bool average_state_collapse_check(const DensityState& prep, const BoxProgram& program, const DitString& nu,
                                  double tol);

// Random instances for property tests and sweeps.

struct RandomProgramOptions {
  unsigned internal_dim = 2;
  unsigned max_kraus = 2;
  bool lossy = true;
};

/// Random local program: independent random channels per (box, input).
BoxProgram random_local_program(unsigned m, unsigned d, const RandomProgramOptions& options, std::uint64_t seed);
/// Random joint program for k systems (entangling internal operations allowed).
BoxProgram random_joint_program(const PathedHilbert& hilbert, unsigned d, const RandomProgramOptions& options,
                                std::uint64_t seed);
/// Random mixed state with coherence between paths.
DensityState random_state(const PathedHilbert& hilbert, std::uint64_t seed, std::size_t rank = 2);
/// Random d-outcome POVM on the full space.
Povm random_povm(const PathedHilbert& hilbert, unsigned d, std::uint64_t seed);

}  // namespace parity
