#include "parity/kernels.hpp"

#include <cmath>

#include <omp.h>

namespace parity {

void set_kernel_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int kernel_threads() { return omp_get_max_threads(); }

namespace kernels {
namespace {

// In-place DFT along every axis with the sign of the exponent given by `sign`.
void separable_transform(std::vector<Complex>& data, unsigned m, unsigned d, int sign) {
  const std::size_t n_inputs = int_pow(d, m);
  std::vector<Complex> roots(d);
  for (unsigned r = 0; r < d; ++r) roots[r] = root_of_unity(d, sign * static_cast<long long>(r));

  std::size_t stride = 1;
  for (unsigned axis = 0; axis < m; ++axis) {
    const std::size_t fibres = n_inputs / d;
    const auto total = static_cast<long long>(fibres * d);  // (fibre, b) pairs
#pragma omp parallel for schedule(static)
    for (long long job = 0; job < total; ++job) {
      const std::size_t b = static_cast<std::size_t>(job) % d;
      const std::size_t fibre = static_cast<std::size_t>(job) / d;
      const std::size_t low = fibre % stride;
      const std::size_t high = fibre / stride;
      const std::size_t base = high * stride * d + low;
      Complex in[16];
      Complex local[16];
      std::vector<Complex> spill;
      Complex* src = in;
      Complex* dst = local;
      if (d > 16) {
        spill.resize(2 * d);
        src = spill.data();
        dst = spill.data() + d;
      }
      for (unsigned k = 0; k < d; ++k) src[k] = data[(base + k * stride) * d + b];
      for (unsigned nu = 0; nu < d; ++nu) {
        Complex acc = 0.0;
        for (unsigned k = 0; k < d; ++k) acc += roots[(static_cast<std::size_t>(nu) * k) % d] * src[k];
        dst[nu] = acc;
      }
      for (unsigned k = 0; k < d; ++k) data[(base + k * stride) * d + b] = dst[k];
    }
    stride *= d;
  }
  const double norm = std::pow(static_cast<double>(d), -0.5 * m);
  for (Complex& z : data) z *= norm;
}

}  // namespace

std::vector<Complex> fourier_forward(std::span<const double> table, unsigned m, unsigned d) {
  std::vector<Complex> data(table.begin(), table.end());
  separable_transform(data, m, d, +1);
  return data;
}

std::vector<Complex> fourier_inverse(std::span<const Complex> coeffs, unsigned m, unsigned d) {
  std::vector<Complex> data(coeffs.begin(), coeffs.end());
  separable_transform(data, m, d, -1);
  return data;
}

std::vector<Complex> fourier_forward_serial(std::span<const double> table, unsigned m, unsigned d) {
  const std::size_t n_inputs = int_pow(d, m);
  std::vector<Complex> out(n_inputs * d);
  std::vector<unsigned> nu(m), x(m);
  const double norm = std::pow(static_cast<double>(d), -0.5 * m);
  for (std::size_t nu_idx = 0; nu_idx < n_inputs; ++nu_idx) {
    std::size_t t = nu_idx;
    for (unsigned i = 0; i < m; ++i, t /= d) nu[i] = static_cast<unsigned>(t % d);
    for (std::size_t x_idx = 0; x_idx < n_inputs; ++x_idx) {
      std::size_t u = x_idx;
      unsigned long long phase = 0;
      for (unsigned i = 0; i < m; ++i, u /= d) phase += static_cast<unsigned long long>(nu[i]) * (u % d);
      const Complex w = root_of_unity(d, static_cast<long long>(phase % d));
      for (unsigned b = 0; b < d; ++b) out[nu_idx * d + b] += w * table[x_idx * d + b];
    }
  }
  for (Complex& z : out) z *= norm;
  return out;
}

}  // namespace kernels
}  // namespace parity
