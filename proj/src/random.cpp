#include "parity/random.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace parity {

Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x5eedu};
  return Rng(seq);
}

Complex complex_normal(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double re = normal(rng);
  const double im = normal(rng);
  return {re * M_SQRT1_2, im * M_SQRT1_2};
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

ComplexMatrix random_ginibre(std::size_t rows, std::size_t cols, Rng& rng) {
  ComplexMatrix g(rows, cols);
  for (Complex& z : g.data()) z = complex_normal(rng);
  return g;
}

ComplexMatrix random_unitary(std::size_t n, Rng& rng) {
  using Mat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const ComplexMatrix g = random_ginibre(n, n, rng);
  const auto en = static_cast<Eigen::Index>(n);
  Eigen::Map<const Mat> view(g.data().data(), en, en);
  Eigen::HouseholderQR<Mat> qr(view);
  const Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().template triangularView<Eigen::Upper>();
  ComplexMatrix u(n, n);
  for (Eigen::Index c = 0; c < en; ++c) {
    const Complex diag = r(c, c);
    const Complex phase = std::abs(diag) > 0 ? diag / std::abs(diag) : Complex{1.0, 0.0};
    for (Eigen::Index row = 0; row < en; ++row) u(row, c) = q(row, c) * phase;
  }
  return u;
}

std::vector<Complex> random_ket(std::size_t n, Rng& rng) {
  std::vector<Complex> v(n);
  double norm = 0.0;
  for (Complex& z : v) {
    z = complex_normal(rng);
    norm += std::norm(z);
  }
  norm = std::sqrt(norm);
  for (Complex& z : v) z /= norm;
  return v;
}

ComplexMatrix random_density(std::size_t n, std::size_t rank, Rng& rng) {
  const ComplexMatrix g = random_ginibre(n, std::max<std::size_t>(rank, 1), rng);
  ComplexMatrix rho = g * g.adjoint();
  rho *= 1.0 / rho.trace().real();
  return rho;
}

std::vector<ComplexMatrix> random_kraus(std::size_t dim, std::size_t count, bool lossy, Rng& rng) {
  count = std::max<std::size_t>(count, 1);
  const ComplexMatrix u = random_unitary(dim * count, rng);
  ComplexMatrix contraction = ComplexMatrix::identity(dim);
  if (lossy) {
    contraction = random_ginibre(dim, dim, rng);
    const HermitianEigen eig = hermitian_eigen(contraction.adjoint() * contraction);
    const double opnorm = std::sqrt(std::max(eig.values.back(), 1e-300));
    contraction *= (0.5 + 0.5 * uniform01(rng)) / opnorm;
  }
  std::vector<ComplexMatrix> ops;
  ops.reserve(count);
  for (std::size_t s = 0; s < count; ++s) {
    ComplexMatrix block(dim, dim);
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = 0; c < dim; ++c) block(r, c) = u(s * dim + r, c);
    ops.push_back(block * contraction);
  }
  return ops;
}

std::vector<ComplexMatrix> random_povm_effects(std::size_t dim, std::size_t outcomes, Rng& rng) {
  std::vector<ComplexMatrix> raw;
  ComplexMatrix total(dim, dim);
  for (std::size_t b = 0; b < outcomes; ++b) {
    const ComplexMatrix g = random_ginibre(dim, dim, rng);
    raw.push_back(g * g.adjoint());
    total += raw.back();
  }
  const ComplexMatrix inv_sqrt = hermitian_function(total, [](double l) { return 1.0 / std::sqrt(l); }, 1e-12);
  std::vector<ComplexMatrix> effects;
  for (const ComplexMatrix& a : raw) effects.push_back(inv_sqrt * a * inv_sqrt);
  return effects;
}

std::vector<double> random_stochastic_table(unsigned m, unsigned d, Rng& rng, double sharpness) {
  const std::size_t n = int_pow(d, m);
  std::vector<double> table(n * d);
  for (std::size_t x = 0; x < n; ++x) {
    double sum = 0.0;
    for (unsigned b = 0; b < d; ++b) {
      const double v = std::pow(uniform01(rng) + 1e-3, sharpness);
      table[x * d + b] = v;
      sum += v;
    }
    for (unsigned b = 0; b < d; ++b) table[x * d + b] /= sum;
  }
  return table;
}

}  // namespace parity
