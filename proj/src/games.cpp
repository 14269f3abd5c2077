#include "parity/games.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "parity/random.hpp"

namespace parity {
namespace {

void require_match(const ConditionalDistribution& dist, const DitString& nu) {
  if (nu.modulus() != dist.d()) throw DomainError("modulus of nu does not match the distribution");
  if (nu.size() != dist.m()) throw DomainError("length of nu does not match the box count");
}

// s_{x,nu} for every input index, in enumeration order.
std::vector<unsigned> modulo_classes(unsigned m, const DitString& nu) {
  const unsigned d = nu.modulus();
  const std::size_t n = int_pow(d, m);
  std::vector<unsigned> s(n);
  std::vector<unsigned> x(m, 0);
  for (std::size_t idx = 0; idx < n; ++idx) {
    unsigned long long acc = 0;
    for (unsigned i = 0; i < m; ++i) acc += static_cast<unsigned long long>(nu[i]) * x[i];
    s[idx] = static_cast<unsigned>(acc % d);
    for (unsigned i = 0; i < m; ++i) {
      if (++x[i] < d) break;
      x[i] = 0;
    }
  }
  return s;
}

// Shifts a truncated (row sums still one) table towards uniform until every
// entry is non-negative. Returns the mixing weight.
double mix_with_uniform(std::vector<double>& table, unsigned d) {
  const double u = 1.0 / d;
  double worst = 0.0;
  for (double v : table) worst = std::max(worst, u - v);
  const double t = worst > u ? u / worst : 1.0;
  for (double& v : table) v = u + t * (v - u);
  // Roundoff can leave -1e-17; clamp without disturbing row sums noticeably.
  for (double& v : table) v = std::max(v, 0.0);
  return t;
}

}  // namespace

GameSpec::GameSpec(DitString nu_in, Permutation f_in, unsigned k_in)
    : nu(std::move(nu_in)), f(std::move(f_in)), k(k_in) {
  if (nu.size() == 0) throw DomainError("GameSpec: at least one box is required");
  for (unsigned v : nu.digits())
    if (v == 0) throw DomainError("GameSpec: weights must be non-zero");
  if (f.size() != nu.modulus()) throw DomainError("GameSpec: relabelling size differs from d");
}

GameSpec GameSpec::unit(unsigned d, unsigned m, unsigned k) {
  return GameSpec(DitString::unit(d, m), Permutation::identity(d), k);
}

ConditionalDistribution::ConditionalDistribution(unsigned m, unsigned d, std::vector<double> table)
    : m_(m), d_(d), table_(std::move(table)) {
  if (d_ < 2 || !is_prime(d_)) throw DomainError("ConditionalDistribution: d must be prime");
  if (table_.size() != int_pow(d_, m_) * d_) throw DomainError("ConditionalDistribution: table size is not d^(m+1)");
  for (std::size_t x = 0; x < num_inputs(); ++x) {
    double sum = 0.0;
    for (unsigned b = 0; b < d_; ++b) {
      const double p = table_[x * d_ + b];
      if (!(p >= -kEntryTol && p <= 1.0 + kEntryTol))
        throw DomainError("ConditionalDistribution: entry outside [0,1] at input " + std::to_string(x));
      sum += p;
    }
    if (std::abs(sum - 1.0) > kRowSumTol)
      throw DomainError("ConditionalDistribution: row " + std::to_string(x) + " sums to " + std::to_string(sum));
  }
}

ConditionalDistribution ConditionalDistribution::uniform(unsigned m, unsigned d) {
  return ConditionalDistribution(m, d, std::vector<double>(int_pow(d, m) * d, 1.0 / d));
}

double modulo_win_probability(const ConditionalDistribution& dist, const DitString& nu, const Permutation& f) {
  require_match(dist, nu);
  if (f.size() != dist.d()) throw DomainError("relabelling size differs from d");
  const std::vector<unsigned> s = modulo_classes(dist.m(), nu);
  double acc = 0.0;
  for (std::size_t x = 0; x < s.size(); ++x) acc += dist(x, f(s[x]));
  return acc / static_cast<double>(s.size());
}

double win_probability(const ConditionalDistribution& dist, const GameSpec& spec) {
  return modulo_win_probability(dist, spec.nu, spec.f);
}

double interference_term(const ConditionalDistribution& dist, const GameSpec& spec) {
  return win_probability(dist, spec) - 1.0 / dist.d();
}

Complex dual_term(const ConditionalDistribution& dist, const DitString& nu, unsigned b, unsigned alpha) {
  require_match(dist, nu);
  const unsigned d = dist.d();
  if (b >= d) throw DomainError("dual_term: outcome out of range");
  if (alpha % d == 0) throw DomainError("dual_term: alpha must be non-zero mod d");
  const std::vector<unsigned> s = modulo_classes(dist.m(), nu);
  // Accumulate per residue first, so the phase sum is d terms.
  std::vector<double> mass(d, 0.0);
  for (std::size_t x = 0; x < s.size(); ++x) mass[s[x]] += dist(x, b);
  Complex acc = 0.0;
  for (unsigned r = 0; r < d; ++r) acc += root_of_unity(d, static_cast<long long>(alpha) * r) * mass[r];
  return acc / static_cast<double>(s.size());
}

ComplexMatrix modulo_marginal_matrix(const ConditionalDistribution& dist, const DitString& nu) {
  require_match(dist, nu);
  if (nu.weight() == 0) throw DomainError("modulo_marginal_matrix: nu must have a non-zero digit");
  const unsigned d = dist.d();
  const std::vector<unsigned> s = modulo_classes(dist.m(), nu);
  ComplexMatrix p(d, d);
  for (std::size_t x = 0; x < s.size(); ++x)
    for (unsigned b = 0; b < d; ++b) p(b, s[x]) += dist(x, b);
  p *= static_cast<double>(d) / static_cast<double>(s.size());
  return p;
}

DualityCheck game_dual_equivalence(const ConditionalDistribution& dist, const DitString& nu, double tol) {
  const unsigned d = dist.d();
  if (d > 7) throw DomainError("game_dual_equivalence: d > 7 would enumerate more than 5040 relabellings");
  const ComplexMatrix p = modulo_marginal_matrix(dist, nu);
  DualityCheck out{true, true, 0.0, 0.0};
  for (const Permutation& f : all_permutations(d)) {
    double acc = 0.0;
    for (unsigned s = 0; s < d; ++s) acc += p(f(s), s).real();
    out.max_game_term = std::max(out.max_game_term, std::abs(acc / d - 1.0 / d));
  }
  for (unsigned b = 0; b < d; ++b)
    for (unsigned alpha = 1; alpha < d; ++alpha)
      out.max_dual_term = std::max(out.max_dual_term, std::abs(dual_term(dist, nu, b, alpha)));
  out.game_side_vanishes = out.max_game_term <= tol;
  out.dual_side_vanishes = out.max_dual_term <= tol;
  return out;
}

FourierSpectrum fourier_spectrum(const ConditionalDistribution& dist, Execution exec) {
  auto coeffs = exec == Execution::Parallel ? kernels::fourier_forward(dist.table(), dist.m(), dist.d())
                                            : kernels::fourier_forward_serial(dist.table(), dist.m(), dist.d());
  return FourierSpectrum{dist.m(), dist.d(), std::move(coeffs)};
}

std::vector<double> reconstruct_table(const FourierSpectrum& spectrum) {
  const auto values = kernels::fourier_inverse(spectrum.coefficients, spectrum.m, spectrum.d);
  std::vector<double> table(values.size());
  std::transform(values.begin(), values.end(), table.begin(), [](Complex z) { return z.real(); });
  return table;
}

unsigned algebraic_order(const FourierSpectrum& spectrum, double tol) {
  const std::size_t n = int_pow(spectrum.d, spectrum.m);
  unsigned order = 0;
  for (std::size_t nu = 1; nu < n; ++nu) {
    const DitString digits = DitString::from_index(spectrum.d, spectrum.m, nu);
    const auto w = static_cast<unsigned>(digits.weight());
    if (w <= order) continue;
    for (unsigned b = 0; b < spectrum.d; ++b)
      if (std::abs(spectrum.coefficients[nu * spectrum.d + b]) > tol) {
        order = w;
        break;
      }
  }
  return order;
}

unsigned algebraic_order(const ConditionalDistribution& dist, double tol) {
  return algebraic_order(fourier_spectrum(dist), tol);
}

std::vector<double> max_dual_by_weight(const FourierSpectrum& spectrum) {
  const std::size_t n = int_pow(spectrum.d, spectrum.m);
  const double scale = std::pow(static_cast<double>(spectrum.d), -0.5 * spectrum.m);
  std::vector<double> out(spectrum.m + 1, 0.0);
  for (std::size_t nu = 0; nu < n; ++nu) {
    const std::size_t w = DitString::from_index(spectrum.d, spectrum.m, nu).weight();
    for (unsigned b = 0; b < spectrum.d; ++b)
      out[w] = std::max(out[w], std::abs(spectrum.coefficients[nu * spectrum.d + b]) * scale);
  }
  return out;
}

SyntheticDistribution synthesize_order_n_distribution(unsigned m, unsigned d, unsigned n, std::uint64_t seed) {
  if (n > m) throw DomainError("synthesize_order_n_distribution: n must not exceed m");
  Rng rng = make_rng(seed);
  const std::vector<double> raw = random_stochastic_table(m, d, rng);
  FourierSpectrum spectrum{m, d, kernels::fourier_forward(raw, m, d)};
  const std::size_t n_inputs = int_pow(d, m);
  for (std::size_t nu = 0; nu < n_inputs; ++nu)
    if (DitString::from_index(d, m, nu).weight() > n)
      for (unsigned b = 0; b < d; ++b) spectrum.coefficients[nu * d + b] = 0.0;

  std::vector<double> table = reconstruct_table(spectrum);
  const double t = mix_with_uniform(table, d);
  ConditionalDistribution dist(m, d, std::move(table));

  bool exact = n == 0;
  if (!exact) {
    const FourierSpectrum check = fourier_spectrum(dist);
    for (std::size_t nu = 0; nu < n_inputs && !exact; ++nu) {
      if (DitString::from_index(d, m, nu).weight() != n) continue;
      for (unsigned b = 0; b < d; ++b)
        if (std::abs(check.coefficients[nu * d + b]) > kOrderTol) exact = true;
    }
  }
  return SyntheticDistribution{std::move(dist), n, exact, t};
}

ConditionalDistribution synthesize_with_vanishing_modes(const DitString& nu, std::uint64_t seed) {
  const unsigned d = nu.modulus();
  const auto m = static_cast<unsigned>(nu.size());
  if (nu.weight() == 0) throw DomainError("synthesize_with_vanishing_modes: nu must be non-zero");
  Rng rng = make_rng(seed);
  const std::vector<double> raw = random_stochastic_table(m, d, rng);
  FourierSpectrum spectrum{m, d, kernels::fourier_forward(raw, m, d)};
  for (unsigned alpha = 1; alpha < d; ++alpha) {
    const std::size_t idx = nu.scaled(alpha).index();
    for (unsigned b = 0; b < d; ++b) spectrum.coefficients[idx * d + b] = 0.0;
  }
  std::vector<double> table = reconstruct_table(spectrum);
  mix_with_uniform(table, d);
  return ConditionalDistribution(m, d, std::move(table));
}

ConditionalDistribution random_distribution(unsigned m, unsigned d, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return ConditionalDistribution(m, d, random_stochastic_table(m, d, rng));
}

ConditionalDistribution product_distribution(const ConditionalDistribution& a, std::span<const unsigned> a_boxes,
                                             const ConditionalDistribution& b, std::span<const unsigned> b_boxes,
                                             unsigned m_total) {
  if (a.d() != b.d()) throw DomainError("product_distribution: modulus mismatch");
  if (a_boxes.size() != a.m() || b_boxes.size() != b.m())
    throw DomainError("product_distribution: box list length differs from the factor's box count");
  auto check_boxes = [m_total](std::span<const unsigned> boxes) {
    std::vector<bool> seen(m_total, false);
    for (unsigned i : boxes) {
      if (i >= m_total || seen[i]) throw DomainError("product_distribution: invalid box list");
      seen[i] = true;
    }
  };
  check_boxes(a_boxes);
  check_boxes(b_boxes);

  const unsigned d = a.d();
  const std::size_t n = int_pow(d, m_total);
  std::vector<double> table(n * d, 0.0);
  std::vector<unsigned> x(m_total, 0);
  for (std::size_t idx = 0; idx < n; ++idx) {
    std::size_t xa = 0, xb = 0;
    for (std::size_t j = a_boxes.size(); j-- > 0;) xa = xa * d + x[a_boxes[j]];
    for (std::size_t j = b_boxes.size(); j-- > 0;) xb = xb * d + x[b_boxes[j]];
    for (unsigned ba = 0; ba < d; ++ba)
      for (unsigned bb = 0; bb < d; ++bb) table[idx * d + (ba + bb) % d] += a(xa, ba) * b(xb, bb);
    for (unsigned i = 0; i < m_total; ++i) {
      if (++x[i] < d) break;
      x[i] = 0;
    }
  }
  return ConditionalDistribution(m_total, d, std::move(table));
}

void write_table(std::ostream& out, const ConditionalDistribution& dist) {
  out << dist.m() << ' ' << dist.d() << '\n';
  char buf[32];
  for (std::size_t x = 0; x < dist.num_inputs(); ++x) {
    for (unsigned b = 0; b < dist.d(); ++b) {
      std::snprintf(buf, sizeof buf, "%.17g", dist(x, b));
      out << (b ? " " : "") << buf;
    }
    out << '\n';
  }
}

ConditionalDistribution read_table(std::istream& in) {
  unsigned m = 0, d = 0;
  std::string header;
  if (!std::getline(in, header)) throw DomainError("read_table: missing header");
  std::istringstream hs(header);
  if (!(hs >> m >> d)) throw DomainError("read_table: header must be 'm d'");
  if (d < 2 || !is_prime(d)) throw DomainError("read_table: d must be prime");
  const std::size_t n = int_pow(d, m);
  std::vector<double> table;
  table.reserve(n * d);
  std::string line;
  for (std::size_t x = 0; x < n; ++x) {
    if (!std::getline(in, line)) throw DomainError("read_table: expected " + std::to_string(n) + " rows");
    std::istringstream ls(line);
    for (unsigned b = 0; b < d; ++b) {
      double v;
      if (!(ls >> v)) throw DomainError("read_table: row " + std::to_string(x) + " is short");
      table.push_back(v);
    }
  }
  return ConditionalDistribution(m, d, std::move(table));
}

}  // namespace parity
