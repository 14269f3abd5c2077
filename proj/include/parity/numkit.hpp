#pragma once

// Dense complex linear algebra and modular arithmetic sized for exhaustive
// enumeration over small games. Everything here is a value type; nothing
// holds shared mutable state.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace parity {

using Complex = std::complex<double>;

/// Tolerance for "equals zero" on analytically exact quantities.
inline constexpr double kExactTol = 1e-9;
/// Tolerance where randomized channels accumulate roundoff.
inline constexpr double kChannelTol = 1e-7;
/// Floor for eigenvalues in positive-semidefinite checks.
inline constexpr double kPsdFloor = 1e-9;

/// Raised when a value violates a structural precondition (bad modulus,
/// dimension mismatch, non-bijective relabelling, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A simulated object broke a physical contract (non-CP program, POVM that
/// does not sum to the identity, negative probability, ...).
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Hilbert space exceeds the simulator's dimension cap.
class DimensionCapError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Row-major dense complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix diagonal(std::span<const Complex> diag);
  /// |v><v|
  static ComplexMatrix projector(std::span<const Complex> ket);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return entries_.empty(); }

  Complex& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  std::span<Complex> data() { return entries_; }
  std::span<const Complex> data() const { return entries_; }

  ComplexMatrix adjoint() const;
  Complex trace() const;
  /// max_{ij} |a_ij|
  double max_abs() const;

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scale);

  bool is_hermitian(double tol = kExactTol) const;
  /// Hermitian and every eigenvalue >= -tol.
  bool is_psd(double tol = kPsdFloor) const;
  bool is_unitary(double tol = kExactTol) const;

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> entries_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex s, ComplexMatrix a);

/// a * rho * a^dagger, accumulated into `out`.
void add_sandwich(const ComplexMatrix& a, const ComplexMatrix& rho, ComplexMatrix& out);

/// max_{ij} |a_ij - b_ij|; dims must agree.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Kronecker product; dims multiply.
ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b);

/// Deterministic primality by trial division. Throws for d < 2.
bool is_prime(std::uint64_t d);

/// Primitive d-th root of unity raised to `power` (reduced mod d).
Complex root_of_unity(unsigned d, long long power);

/// F_{lk} = omega_d^{lk} / sqrt(d). Throws for non-prime d.
ComplexMatrix fourier_matrix(unsigned d);

/// Eigen-decomposition of a Hermitian matrix: ascending eigenvalues, matching
/// eigenvectors stored as columns.
struct HermitianEigen {
  std::vector<double> values;
  ComplexMatrix vectors;
};
HermitianEigen hermitian_eigen(const ComplexMatrix& h);

/// Applies `fn` to the spectrum of a Hermitian matrix. Eigenvalues with
/// |lambda| <= cutoff are mapped to zero instead, which gives pseudo-inverse
/// style functions their support restriction.
template <class Fn>
ComplexMatrix hermitian_function(const ComplexMatrix& h, Fn fn, double cutoff = 0.0) {
  const HermitianEigen eig = hermitian_eigen(h);
  const std::size_t n = h.rows();
  ComplexMatrix out(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = eig.values[k];
    if (std::abs(lambda) <= cutoff) continue;
    const double f = fn(lambda);
    for (std::size_t r = 0; r < n; ++r) {
      const Complex vr = eig.vectors(r, k) * f;
      for (std::size_t c = 0; c < n; ++c) out(r, c) += vr * std::conj(eig.vectors(c, k));
    }
  }
  return out;
}

/// Fixed-length string of digits modulo a prime d.
class DitString {
 public:
  DitString(unsigned d, std::vector<unsigned> digits);
  /// The all-ones string of length m.
  static DitString unit(unsigned d, std::size_t m);
  /// Mixed-radix decode with digit 0 least significant.
  static DitString from_index(unsigned d, std::size_t m, std::size_t index);

  unsigned modulus() const { return d_; }
  std::size_t size() const { return digits_.size(); }
  unsigned operator[](std::size_t i) const { return digits_[i]; }
  std::span<const unsigned> digits() const { return digits_; }

  /// Number of non-zero digits.
  std::size_t weight() const;
  /// Inverse of from_index.
  std::size_t index() const;
  /// Every digit multiplied by `alpha` mod d.
  DitString scaled(unsigned alpha) const;

  friend bool operator==(const DitString&, const DitString&) = default;

 private:
  unsigned d_;
  std::vector<unsigned> digits_;
};

/// (sum_i nu_i x_i) mod d.
unsigned weighted_mod_sum(const DitString& x, const DitString& nu);

/// Bijection on {0, ..., d-1}.
class Permutation {
 public:
  explicit Permutation(std::vector<unsigned> image);
  static Permutation identity(unsigned d);

  unsigned size() const { return static_cast<unsigned>(image_.size()); }
  unsigned operator()(unsigned s) const { return image_[s]; }
  std::span<const unsigned> image() const { return image_; }
  Permutation inverse() const;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<unsigned> image_;
};

/// All d! permutations in lexicographic order of their images.
std::vector<Permutation> all_permutations(unsigned d);

/// d^m with overflow guard.
std::size_t int_pow(std::size_t base, std::size_t exp);

}  // namespace parity
