#pragma once

// Data-parallel kernels over the d^m input enumeration. Each kernel comes in
// an OpenMP version and a plain serial version; the serial one is the
// reference the tests compare against. Parallel kernels never reduce
// floating-point values across threads, so both produce bit-identical output
// regardless of thread count.

#include <cstddef>
#include <span>
#include <vector>

#include "parity/numkit.hpp"

namespace parity {

enum class Execution { Serial, Parallel };

/// Number of OpenMP threads used by parallel kernels. `n == 0` keeps the
/// runtime default.
void set_kernel_threads(int n);
int kernel_threads();

namespace kernels {

/// lambda[nu * d + b] = d^{-m/2} sum_x omega^{nu.x} table[x * d + b].
/// Inputs and nu use the little-endian index of DitString (x_1 fastest).
/// Separable transform, one axis at a time, parallel over fibres.
std::vector<Complex> fourier_forward(std::span<const double> table, unsigned m, unsigned d);

/// Inverse of fourier_forward: d^{-m/2} sum_nu omega^{-nu.x} lambda.
std::vector<Complex> fourier_inverse(std::span<const Complex> coeffs, unsigned m, unsigned d);

/// Direct O(d^{2m}) evaluation of fourier_forward.
std::vector<Complex> fourier_forward_serial(std::span<const double> table, unsigned m, unsigned d);

}  // namespace kernels
}  // namespace parity
