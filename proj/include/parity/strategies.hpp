#pragma once

// Explicit strategies for modulo games, their modulo-sum composition, the
// composition lower bound and the particle-number witness.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "parity/games.hpp"
#include "parity/quantum.hpp"

namespace parity {

/// A complete protocol: Alice's preparation, the boxes, Bob's measurement.
struct Strategy {
  std::string name;
  unsigned d;
  unsigned m;
  /// Number of systems Alice sends.
  unsigned k;
  DensityState prep;
  BoxProgram program;
  Povm povm;
  /// Boxes the strategy actually reads out (0-based).
  std::vector<unsigned> box_set;
  unsigned fold_outcome = 0;
};

ConditionalDistribution run_strategy(const Strategy& strategy, Execution exec = Execution::Parallel);

/// Same strategy with path coherence removed from the preparation. The boxes
/// are path-diagonal, so this is the classical version of the protocol.
Strategy dephased(const Strategy& strategy);

/// Pretty-good measurement for the ensemble {w_s, rho_s}:
/// Pi_s = sigma^{-1/2} w_s rho_s sigma^{-1/2} with sigma = sum_s w_s rho_s.
/// The projector onto the complement of sigma's support is added to
/// `fold_outcome`, so the effects always sum to the identity.
Povm pretty_good_measurement(std::span<const ComplexMatrix> states, std::span<const double> weights,
                             unsigned fold_outcome = 0);
Povm pretty_good_measurement(std::span<const DensityState> states, std::span<const double> weights,
                             unsigned fold_outcome = 0);

/// One particle over two paths, phase boxes e^{i pi x}, measurement in the
/// +/- basis. Decodes the parity of two inputs.
Strategy binary_phase_strategy();

/// One particle over two paths, box phases omega^{-nu_1 x_1} and
/// omega^{nu_2 x_2}, PGM of the modulo-class averages with equal weights.
Strategy dary_phase_strategy(unsigned d, const DitString& nu);

/// k = m/2 particles; particle p runs the two-box phase protocol on boxes
/// (2p, 2p+1) with its own PGM, and Bob outputs the sum of the k results.
Strategy paired_phase_strategy(const DitString& nu);

/// Classical counting: particle p goes to box p and picks up the internal mark
/// X^{x_p} (cyclic shift on Z_d; for d = 2 the mark plays the role of
/// "absorbed"). Bob reads the marks and outputs the weighted sum over the
/// boxes that were visited. When m > k some boxes are never visited and the
/// game is at chance. Particles beyond m sit in box 0 and are ignored.
/// `require_win` rejects m > k.
Strategy classical_counting_strategy(unsigned k, unsigned m, unsigned d, const DitString& nu,
                                     bool require_win = false);
Strategy classical_counting_strategy(unsigned k, unsigned m, unsigned d);

/// Random single-system strategy on boxes 0..m-1: random mixed preparation,
/// random local program, and Bob's PGM for the modulo-class averages of nu.
Strategy random_pgm_strategy(const DitString& nu, const RandomProgramOptions& options, std::uint64_t seed);

/// P(b|x) with b = (b_A + b_B) mod d over `m_total` boxes. Box sets must be
/// disjoint.
ConditionalDistribution compose_modulo_strategies(const ConditionalDistribution& a, std::span<const unsigned> a_boxes,
                                                  const ConditionalDistribution& b, std::span<const unsigned> b_boxes,
                                                  unsigned m_total);

/// q_A q_B + (1 - q_A)(1 - q_B)/(d - 1) - 1/d
double additivity_lower_bound(double q_a, double q_b, unsigned d);

struct WitnessResult {
  unsigned detected_order = 0;
  unsigned particle_lower_bound = 0;
  /// Box subset (bit i = box i) -> max |dual term| over nu supported exactly
  /// on that subset, over every b.
  std::map<std::uint32_t, double> per_subset_evidence;
};

WitnessResult particle_number_witness(const ConditionalDistribution& dist, double tol = kChannelTol);

/// Game terms for every non-zero nu (identity relabelling), every dual term,
/// the algebraic order, and optionally the witness bound.
InterferenceReport build_report(const ConditionalDistribution& dist, bool with_witness,
                                double witness_tol = kChannelTol);

/// One composed pair of random single-system strategies.
struct CompositionSample {
  unsigned d;
  DitString nu_a;
  DitString nu_b;
  std::uint64_t seed_a;
  std::uint64_t seed_b;
  double q_a;
  double q_b;
  /// Interference term of the composed 4-box distribution for (nu_a, nu_b).
  double composed;
  double bound;
};

/// `count` pairs cycling through `moduli`. Each side is a random_pgm_strategy
/// on two boxes, redrawn until its winning probability exceeds 1/d.
std::vector<CompositionSample> composition_sweep(std::span<const unsigned> moduli, unsigned count,
                                                 std::uint64_t seed, const RandomProgramOptions& options = {});

}  // namespace parity
