#pragma once

// Analysis layer for modulo games: interference terms, their Fourier duals,
// the game/dual equivalence, algebraic order and synthetic distributions.
// Everything is computed by exact enumeration of the d^m inputs.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "parity/kernels.hpp"
#include "parity/numkit.hpp"

namespace parity {

/// One game instance: m boxes, prime modulus d, weights nu (all non-zero),
/// output relabelling f and the declared resource count k.
struct GameSpec {
  GameSpec(DitString nu, Permutation f, unsigned k = 1);
  /// Unit weights, identity relabelling.
  static GameSpec unit(unsigned d, unsigned m, unsigned k = 1);

  unsigned m() const { return static_cast<unsigned>(nu.size()); }
  unsigned d() const { return nu.modulus(); }

  DitString nu;
  Permutation f;
  unsigned k;
};

/// Exact table P(b | x_1 ... x_m). Rows are ordered by the little-endian input
/// index (x_1 varies fastest); each row holds d probabilities.
class ConditionalDistribution {
 public:
  static constexpr double kEntryTol = 1e-12;
  static constexpr double kRowSumTol = 1e-10;

  ConditionalDistribution(unsigned m, unsigned d, std::vector<double> table);
  static ConditionalDistribution uniform(unsigned m, unsigned d);

  unsigned m() const { return m_; }
  unsigned d() const { return d_; }
  std::size_t num_inputs() const { return table_.size() / d_; }

  double operator()(std::size_t x_index, unsigned b) const { return table_[x_index * d_ + b]; }
  std::span<const double> row(std::size_t x_index) const { return {table_.data() + x_index * d_, d_}; }
  std::span<const double> table() const { return table_; }

 private:
  unsigned m_;
  unsigned d_;
  std::vector<double> table_;
};

/// Fourier coefficients lambda_{nu,b} of each P_b over Z_d^m, normalized so the
/// dual term is lambda / d^{m/2}.
struct FourierSpectrum {
  unsigned m;
  unsigned d;
  std::vector<Complex> coefficients;  // [nu_index * d + b]

  Complex lambda(const DitString& nu, unsigned b) const { return coefficients[nu.index() * d + b]; }
};

/// Summary of one scenario's interference structure.
struct InterferenceReport {
  unsigned m = 0;
  unsigned d = 0;
  /// Interference term with identity relabelling, keyed by nu index (nu != 0).
  std::map<std::size_t, double> game_terms;
  /// Dual term with alpha = 1, keyed by (nu index, b), nu != 0.
  std::map<std::pair<std::size_t, unsigned>, Complex> dual_terms;
  unsigned algebraic_order = 0;
  std::optional<unsigned> witness_particles;
};

/// Winning probability of the game on an arbitrary weight string; zero digits
/// drop the corresponding box from the target sum.
double modulo_win_probability(const ConditionalDistribution& dist, const DitString& nu, const Permutation& f);

/// (1/d^m) sum_x P(b = f(s_{x,nu}) | x).
double win_probability(const ConditionalDistribution& dist, const GameSpec& spec);

/// win_probability - 1/d, in [-1/d, 1 - 1/d].
double interference_term(const ConditionalDistribution& dist, const GameSpec& spec);

/// (1/d^m) sum_x omega^{alpha nu.x} P(b|x). Zero digits in nu are allowed.
Complex dual_term(const ConditionalDistribution& dist, const DitString& nu, unsigned b, unsigned alpha = 1);

/// P_{bs} = d^{1-m} sum_{x : s_{x,nu} = s} P(b|x); column stochastic.
ComplexMatrix modulo_marginal_matrix(const ConditionalDistribution& dist, const DitString& nu);

struct DualityCheck {
  bool game_side_vanishes;
  bool dual_side_vanishes;
  double max_game_term;  ///< max_f |I_{nu,f}|
  double max_dual_term;  ///< max_{b,alpha} |J_{nu,b,alpha}|
};

/// Evaluates both sides of the game/dual equivalence for one weight string:
/// all d! relabellings on the game side, all (b, alpha) on the dual side.
/// Rejects d > 7.
DualityCheck game_dual_equivalence(const ConditionalDistribution& dist, const DitString& nu, double tol);

FourierSpectrum fourier_spectrum(const ConditionalDistribution& dist, Execution exec = Execution::Parallel);

/// Inverse transform; returns the (real part of the) reconstructed table.
std::vector<double> reconstruct_table(const FourierSpectrum& spectrum);

inline constexpr double kOrderTol = 1e-8;

/// Largest weight of nu carrying a coefficient with |lambda| > tol.
unsigned algebraic_order(const FourierSpectrum& spectrum, double tol = kOrderTol);
unsigned algebraic_order(const ConditionalDistribution& dist, double tol = kOrderTol);

/// Entry w is max |dual term| (alpha = 1) over nu of weight w and every b.
/// Entry 0 is the constant mode. Size m + 1.
std::vector<double> max_dual_by_weight(const FourierSpectrum& spectrum);

struct SyntheticDistribution {
  ConditionalDistribution dist;
  unsigned requested_order;
  /// Some weight-n coefficient survived the mixing step.
  bool exact_order_achieved;
  /// Weight of the structured part relative to the uniform distribution.
  double mixing;
};

/// Random distribution of algebraic order <= n: a random table is transformed,
/// every coefficient of weight > n is removed, and the result is mixed with
/// the uniform distribution until it is non-negative again.
SyntheticDistribution synthesize_order_n_distribution(unsigned m, unsigned d, unsigned n, std::uint64_t seed);

/// Random distribution whose coefficients vanish on every multiple alpha*nu
/// (so every dual term for nu vanishes) while generic elsewhere.
ConditionalDistribution synthesize_with_vanishing_modes(const DitString& nu, std::uint64_t seed);

/// Random table with no structure imposed.
ConditionalDistribution random_distribution(unsigned m, unsigned d, std::uint64_t seed);

/// P(b|x) = sum_{b_A + b_B = b} P_A(b_A | x restricted to a_boxes) P_B(b_B | x restricted to b_boxes)
/// over `m_total` boxes. Box lists may overlap or coincide.
ConditionalDistribution product_distribution(const ConditionalDistribution& a, std::span<const unsigned> a_boxes,
                                             const ConditionalDistribution& b, std::span<const unsigned> b_boxes,
                                             unsigned m_total);

/// Text table: first line "m d", then one line per input with d values.
void write_table(std::ostream& out, const ConditionalDistribution& dist);
ConditionalDistribution read_table(std::istream& in);

}  // namespace parity
