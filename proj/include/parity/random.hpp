#pragma once

// Seeded generators for random states, channels and measurements. All of them
// draw from a caller-owned engine so a sweep is reproducible from its seed.

#include <cstdint>
#include <random>
#include <vector>

#include "parity/numkit.hpp"

namespace parity {

using Rng = std::mt19937_64;

Rng make_rng(std::uint64_t seed);

Complex complex_normal(Rng& rng);
double uniform01(Rng& rng);

ComplexMatrix random_ginibre(std::size_t rows, std::size_t cols, Rng& rng);
/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
ComplexMatrix random_unitary(std::size_t n, Rng& rng);
/// Normalized random pure state.
std::vector<Complex> random_ket(std::size_t n, Rng& rng);
/// Random density matrix of the given rank (trace one).
ComplexMatrix random_density(std::size_t n, std::size_t rank, Rng& rng);

/// `count` Kraus operators on a `dim`-dimensional space. Trace preserving
/// unless `lossy`, in which case sum B^dagger B is a random strict contraction.
std::vector<ComplexMatrix> random_kraus(std::size_t dim, std::size_t count, bool lossy, Rng& rng);

/// Random full-rank POVM with `outcomes` effects summing to the identity.
std::vector<ComplexMatrix> random_povm_effects(std::size_t dim, std::size_t outcomes, Rng& rng);

/// Random conditional table (rows of d probabilities for each of d^m inputs).
/// `sharpness` > 1 skews rows away from uniform.
std::vector<double> random_stochastic_table(unsigned m, unsigned d, Rng& rng, double sharpness = 3.0);

}  // namespace parity
