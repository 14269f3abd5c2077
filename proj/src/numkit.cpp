#include "parity/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include <Eigen/Dense>

namespace parity {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, Complex{0.0, 0.0}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_)
    throw DomainError("ComplexMatrix: entry count does not match rows x cols");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  entries_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DomainError("ComplexMatrix: ragged initializer");
    entries_.insert(entries_.end(), row.begin(), row.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const Complex> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::projector(std::span<const Complex> ket) {
  const std::size_t n = ket.size();
  ComplexMatrix m(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) m(r, c) = ket[r] * std::conj(ket[c]);
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

Complex ComplexMatrix::trace() const {
  if (!is_square()) throw DomainError("trace of a non-square matrix");
  Complex t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double best = 0.0;
  for (const Complex& z : entries_) best = std::max(best, std::abs(z));
  return best;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw DomainError("matrix sum: dimension mismatch");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw DomainError("matrix difference: dimension mismatch");
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (Complex& z : entries_) z *= scale;
  return *this;
}

bool ComplexMatrix::is_hermitian(double tol) const {
  if (!is_square()) return false;
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = r; c < cols_; ++c)
      if (std::abs((*this)(r, c) - std::conj((*this)(c, r))) > tol) return false;
  return true;
}

bool ComplexMatrix::is_psd(double tol) const {
  if (!is_hermitian(std::max(tol, kExactTol))) return false;
  bool diagonal = true;
  for (std::size_t r = 0; r < rows_ && diagonal; ++r)
    for (std::size_t c = 0; c < cols_; ++c)
      if (r != c && (*this)(r, c) != Complex{}) {
        diagonal = false;
        break;
      }
  if (diagonal) {
    for (std::size_t r = 0; r < rows_; ++r)
      if ((*this)(r, r).real() < -tol) return false;
    return true;
  }
  const HermitianEigen eig = hermitian_eigen(*this);
  return eig.values.empty() || eig.values.front() >= -tol;
}

bool ComplexMatrix::is_unitary(double tol) const {
  if (!is_square()) return false;
  return max_abs_diff(adjoint() * (*this), identity(rows_)) <= tol;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw DomainError("matrix product: inner dimension mismatch");
  ComplexMatrix out(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Complex* row = &out(i, 0);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      const Complex* brow = &b(k, 0);
      for (std::size_t j = 0; j < n; ++j) row[j] += aik * brow[j];
    }
  }
  return out;
}

ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

void add_sandwich(const ComplexMatrix& a, const ComplexMatrix& rho, ComplexMatrix& out) {
  out += (a * rho) * a.adjoint();
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DomainError("max_abs_diff: dimension mismatch");
  double best = 0.0;
  const auto da = a.data();
  const auto db = b.data();
  for (std::size_t i = 0; i < da.size(); ++i) best = std::max(best, std::abs(da[i] - db[i]));
  return best;
}

ComplexMatrix tensor_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ar = 0; ar < a.rows(); ++ar)
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      const Complex s = a(ar, ac);
      if (s == Complex{}) continue;
      for (std::size_t br = 0; br < b.rows(); ++br)
        for (std::size_t bc = 0; bc < b.cols(); ++bc)
          out(ar * b.rows() + br, ac * b.cols() + bc) = s * b(br, bc);
    }
  return out;
}

bool is_prime(std::uint64_t d) {
  if (d < 2) throw DomainError("is_prime: argument must be >= 2");
  for (std::uint64_t p = 2; p * p <= d; ++p)
    if (d % p == 0) return false;
  return true;
}

Complex root_of_unity(unsigned d, long long power) {
  const long long r = ((power % static_cast<long long>(d)) + d) % d;
  // Exact values on the axes keep d = 2 arithmetic free of 1e-16 imaginary parts.
  if (r == 0) return {1.0, 0.0};
  if (2 * r == static_cast<long long>(d)) return {-1.0, 0.0};
  if (4 * r == static_cast<long long>(d)) return {0.0, 1.0};
  if (4 * r == 3 * static_cast<long long>(d)) return {0.0, -1.0};
  return std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(r) / d);
}

ComplexMatrix fourier_matrix(unsigned d) {
  if (d < 2 || !is_prime(d)) throw DomainError("fourier_matrix: d must be prime");
  ComplexMatrix f(d, d);
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  for (unsigned l = 0; l < d; ++l)
    for (unsigned k = 0; k < d; ++k) f(l, k) = norm * root_of_unity(d, static_cast<long long>(l) * k);
  return f;
}

HermitianEigen hermitian_eigen(const ComplexMatrix& h) {
  if (!h.is_square()) throw DomainError("hermitian_eigen: matrix must be square");
  using Mat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const auto n = static_cast<Eigen::Index>(h.rows());
  Eigen::Map<const Mat> view(h.data().data(), n, n);
  // Symmetrize so roundoff-level non-Hermiticity does not bias the solver.
  const Mat sym = 0.5 * (view + view.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> solver(sym);
  if (solver.info() != Eigen::Success) throw std::runtime_error("hermitian_eigen: solver failed");
  HermitianEigen out;
  out.values.resize(h.rows());
  out.vectors = ComplexMatrix(h.rows(), h.rows());
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values[k] = solver.eigenvalues()(k);
    for (Eigen::Index r = 0; r < n; ++r) out.vectors(r, k) = solver.eigenvectors()(r, k);
  }
  return out;
}

DitString::DitString(unsigned d, std::vector<unsigned> digits) : d_(d), digits_(std::move(digits)) {
  if (d_ < 2 || !is_prime(d_)) throw DomainError("DitString: modulus " + std::to_string(d_) + " is not prime");
  for (unsigned v : digits_)
    if (v >= d_) throw DomainError("DitString: digit " + std::to_string(v) + " out of range");
}

DitString DitString::unit(unsigned d, std::size_t m) { return DitString(d, std::vector<unsigned>(m, 1u)); }

DitString DitString::from_index(unsigned d, std::size_t m, std::size_t index) {
  std::vector<unsigned> digits(m);
  for (std::size_t i = 0; i < m; ++i) {
    digits[i] = static_cast<unsigned>(index % d);
    index /= d;
  }
  return DitString(d, std::move(digits));
}

std::size_t DitString::weight() const {
  return static_cast<std::size_t>(std::count_if(digits_.begin(), digits_.end(), [](unsigned v) { return v != 0; }));
}

std::size_t DitString::index() const {
  std::size_t idx = 0;
  for (std::size_t i = digits_.size(); i-- > 0;) idx = idx * d_ + digits_[i];
  return idx;
}

DitString DitString::scaled(unsigned alpha) const {
  std::vector<unsigned> out(digits_.size());
  for (std::size_t i = 0; i < digits_.size(); ++i)
    out[i] = static_cast<unsigned>((static_cast<unsigned long long>(digits_[i]) * alpha) % d_);
  return DitString(d_, std::move(out));
}

unsigned weighted_mod_sum(const DitString& x, const DitString& nu) {
  if (x.modulus() != nu.modulus()) throw DomainError("weighted_mod_sum: modulus mismatch");
  if (x.size() != nu.size()) throw DomainError("weighted_mod_sum: length mismatch");
  unsigned long long acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) acc = (acc + static_cast<unsigned long long>(x[i]) * nu[i]) % x.modulus();
  return static_cast<unsigned>(acc);
}

Permutation::Permutation(std::vector<unsigned> image) : image_(std::move(image)) {
  std::vector<bool> seen(image_.size(), false);
  for (unsigned v : image_) {
    if (v >= image_.size() || seen[v]) throw DomainError("Permutation: image is not a bijection");
    seen[v] = true;
  }
}

Permutation Permutation::identity(unsigned d) {
  std::vector<unsigned> image(d);
  std::iota(image.begin(), image.end(), 0u);
  return Permutation(std::move(image));
}

Permutation Permutation::inverse() const {
  std::vector<unsigned> inv(image_.size());
  for (unsigned s = 0; s < image_.size(); ++s) inv[image_[s]] = s;
  return Permutation(std::move(inv));
}

std::vector<Permutation> all_permutations(unsigned d) {
  std::vector<unsigned> image(d);
  std::iota(image.begin(), image.end(), 0u);
  std::vector<Permutation> out;
  do {
    out.emplace_back(image);
  } while (std::next_permutation(image.begin(), image.end()));
  return out;
}

std::size_t int_pow(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && out > std::numeric_limits<std::size_t>::max() / base)
      throw DomainError("int_pow: overflow");
    out *= base;
  }
  return out;
}

}  // namespace parity
