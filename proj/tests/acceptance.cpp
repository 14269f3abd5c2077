// Acceptance gate: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "parity/random.hpp"
#include "parity/scenario.hpp"

using namespace parity;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Witnessed {
  std::string label;
  ConditionalDistribution dist;
  unsigned k;
  bool phase_strategy;
};

std::vector<Witnessed> g_witnessed;

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

double term_for(const ConditionalDistribution& p, const DitString& nu) {
  return interference_term(p, GameSpec(nu, Permutation::identity(nu.modulus())));
}

Outcome binary_phase() {
  const auto dist = run_strategy(binary_phase_strategy());
  g_witnessed.push_back({"binary_phase", dist, 1, true});
  const double err = std::abs(term_for(dist, DitString::unit(2, 2)) - 0.5);
  return {err <= 1e-12, fmt("|I - 1/2| = %.3g (tol 1e-12)", err)};
}

Outcome dary_phase() {
  const std::vector<std::pair<unsigned, std::vector<std::vector<unsigned>>>> cases{
      {3, {{1, 1}, {1, 2}, {2, 2}}},
      {5, {{1, 1}, {2, 3}, {4, 1}, {3, 3}}},
      {7, {{1, 1}, {3, 5}, {6, 2}, {4, 4}}}};
  double worst = 0.0;
  int count = 0;
  for (const auto& [d, nus] : cases)
    for (const auto& digits : nus) {
      const DitString nu(d, digits);
      const auto dist = run_strategy(dary_phase_strategy(d, nu));
      g_witnessed.push_back({"dary_phase", dist, 1, true});
      worst = std::max(worst, std::abs(term_for(dist, nu) - 1.0 / d));
      ++count;
    }
  return {worst <= 1e-10, fmt("%g cases, max |I - 1/d| = %.3g (tol 1e-10)", count, worst)};
}

Outcome single_system_cap() {
  double worst_dual = 0.0;
  double worst_spread = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const unsigned d = seed % 2 == 0 ? 2 : 3;
    const unsigned dim = 1 + static_cast<unsigned>(seed % 3);
    const PathedHilbert h = PathedHilbert::single(3, dim);
    const DensityState prep = random_state(h, 1000 + seed, 2);
    const BoxProgram prog = random_local_program(3, d, {dim, 3, true}, 2000 + seed);
    const auto dist = run_experiment(prep, prog, random_povm(h, d, 3000 + seed), d, 3);
    g_witnessed.push_back({"single_system", dist, 1, false});
    worst_dual = std::max(worst_dual, max_dual_by_weight(fourier_spectrum(dist))[3]);
    worst_spread = std::max(worst_spread, average_state_spread(prep, prog, DitString::unit(d, 3)));
  }
  return {worst_dual <= 1e-7 && worst_spread <= 1e-8,
          fmt("50 programs, max weight-3 |J| = %.3g (tol 1e-7), max average-state spread = %.3g (tol 1e-8)",
              worst_dual, worst_spread)};
}

Outcome two_system_cap() {
  const std::vector<std::vector<unsigned>> dims{{1, 1}, {1, 2}, {2, 2}};
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const PathedHilbert h(2, 5, dims[seed % dims.size()]);
    const BoxProgram prog = random_joint_program(h, 2, {1, 2, true}, 4000 + seed);
    const auto dist = run_experiment(random_state(h, 5000 + seed, 2), prog, random_povm(h, 2, 6000 + seed), 2, 5);
    g_witnessed.push_back({"two_system", dist, 2, false});
    worst = std::max(worst, max_dual_by_weight(fourier_spectrum(dist))[5]);
  }
  return {worst <= 1e-7, fmt("20 joint programs, max weight-5 |J| = %.3g (tol 1e-7)", worst)};
}

Outcome paired_phase() {
  const auto dist = run_strategy(paired_phase_strategy(DitString::unit(2, 4)));
  g_witnessed.push_back({"paired_phase", dist, 2, true});
  const double err = std::abs(term_for(dist, DitString::unit(2, 4)) - 0.5);
  return {err <= 1e-10, fmt("|I_4 - 1/2| = %.3g (tol 1e-10)", err)};
}

Outcome classical_ladder() {
  double worst = 0.0;
  for (unsigned d : {2u, 3u})
    for (unsigned k = 1; k <= 3; ++k)
      for (unsigned m = 1; m <= k + 1; ++m) {
        const Strategy s = classical_counting_strategy(k, m, d);
        const auto dist = run_strategy(s);
        g_witnessed.push_back({"counting", dist, k, false});
        const double expected = m <= k ? 1.0 - 1.0 / d : 0.0;
        worst = std::max(worst, std::abs(term_for(dist, DitString::unit(d, m)) - expected));
      }
  double worst_dephased = 0.0;
  {
    const auto dist = run_strategy(dephased(binary_phase_strategy()));
    g_witnessed.push_back({"dephased_binary_phase", dist, 1, false});
    worst_dephased = max_dual_by_weight(fourier_spectrum(dist))[2];
  }
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const unsigned d = seed % 2 == 0 ? 2 : 3;
    const PathedHilbert h = PathedHilbert::single(2, 2);
    const DensityState prep = classical_dephase(random_state(h, 7000 + seed, 2));
    const auto dist = run_experiment(prep, random_local_program(2, d, {2, 2, true}, 7100 + seed),
                                     random_povm(h, d, 7200 + seed), d, 2);
    g_witnessed.push_back({"dephased_random", dist, 1, false});
    worst_dephased = std::max(worst_dephased, max_dual_by_weight(fourier_spectrum(dist))[2]);
  }
  return {worst <= 1e-12 && worst_dephased <= 1e-7,
          fmt("ladder max error = %.3g (tol 1e-12), dephased k=1 max weight-2 |J| = %.3g (tol 1e-7)", worst,
              worst_dephased)};
}

Outcome duality() {
  Rng rng = make_rng(8);
  const unsigned moduli[] = {2, 3, 5};
  int agree = 0;
  int total = 0;
  int both_vanish = 0;
  auto nonzero_nu = [&](unsigned d, unsigned m) {
    std::uniform_int_distribution<unsigned> digit(1, d - 1);
    std::vector<unsigned> v(m);
    for (auto& x : v) x = digit(rng);
    return DitString(d, v);
  };
  for (std::uint64_t i = 0; i < 200; ++i) {
    const unsigned d = moduli[i % 3];
    const unsigned m = 1 + static_cast<unsigned>((i / 3) % 3);
    const auto p = random_distribution(m, d, 8000 + i);
    const auto r = game_dual_equivalence(p, nonzero_nu(d, m), 1e-10);
    agree += r.game_side_vanishes == r.dual_side_vanishes;
    ++total;
  }
  for (std::uint64_t i = 0; i < 20; ++i) {
    const unsigned d = moduli[i % 3];
    const unsigned m = 1 + static_cast<unsigned>(i % 3);
    const DitString nu = nonzero_nu(d, m);
    const auto r = game_dual_equivalence(synthesize_with_vanishing_modes(nu, 9000 + i), nu, 1e-10);
    agree += r.game_side_vanishes == r.dual_side_vanishes;
    both_vanish += r.game_side_vanishes && r.dual_side_vanishes;
    ++total;
  }
  return {agree == total && both_vanish == 20,
          fmt("%g/%g cases agree, %g/20 constructed cases vanish on both sides", agree, total, both_vanish)};
}

Outcome algebraic_order_soundness() {
  int cases = 0;
  int violations = 0;
  for (unsigned d : {2u, 3u})
    for (unsigned m = 1; m <= 4; ++m)
      for (unsigned n = 0; n <= m; ++n)
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
          const auto syn = synthesize_order_n_distribution(m, d, n, 10000 + 100 * m + 10 * n + seed);
          violations += algebraic_order(syn.dist, 1e-8) > n;
          ++cases;
        }
  return {violations == 0, fmt("%g synthesized distributions, %g exceed their order", cases, violations)};
}

Outcome composition_bound() {
  const std::vector<unsigned> moduli{2, 3, 5};
  const auto samples = composition_sweep(moduli, 200, 2024);
  int violations[6] = {0, 0, 0, 0, 0, 0};
  int by_d[6] = {0, 0, 0, 0, 0, 0};
  double worst = 0.0;
  bool above_chance = true;
  for (const auto& s : samples) {
    ++by_d[s.d];
    above_chance = above_chance && s.q_a > 1.0 / s.d && s.q_b > 1.0 / s.d;
    if (s.composed < s.bound - 1e-9) {
      ++violations[s.d];
      worst = std::max(worst, s.bound - s.composed);
    }
  }
  double at_chance = 0.0;
  for (unsigned d : moduli) at_chance = std::max(at_chance, std::abs(additivity_lower_bound(1.0 / d, 1.0 / d, d)));
  const int total = violations[2] + violations[3] + violations[5];
  std::ostringstream detail;
  detail << samples.size() << " pairs, violations d=2: " << violations[2] << "/" << by_d[2] << ", d=3: " << violations[3]
         << "/" << by_d[3] << ", d=5: " << violations[5] << "/" << by_d[5] << fmt(", worst shortfall %.3g", worst)
         << fmt(", bound at q=1/d: %.3g", at_chance);
  return {total == 0 && above_chance && at_chance <= 1e-15, detail.str()};
}

Outcome product_decoupling() {
  double worst = 0.0;
  int cases = 0;
  const std::vector<std::pair<unsigned, unsigned>> splits{{2, 2}, {3, 1}, {1, 3}};
  for (unsigned d : {2u, 3u})
    for (const auto& [ma, mb] : splits)
      for (unsigned na = 0; na <= ma; ++na)
        for (unsigned nb = 0; nb <= mb && na + nb <= 4; ++nb) {
          const auto a = synthesize_order_n_distribution(ma, d, na, 11000 + 10 * na + nb).dist;
          const auto b = synthesize_order_n_distribution(mb, d, nb, 12000 + 10 * na + nb).dist;
          std::vector<unsigned> a_boxes, b_boxes;
          for (unsigned i = 0; i < ma; ++i) a_boxes.push_back(i);
          for (unsigned i = 0; i < mb; ++i) b_boxes.push_back(ma + i);
          const auto prod = product_distribution(a, a_boxes, b, b_boxes, ma + mb);
          const auto by_weight = max_dual_by_weight(fourier_spectrum(prod));
          for (unsigned w = na + nb + 1; w < by_weight.size(); ++w) worst = std::max(worst, by_weight[w]);
          ++cases;
        }
  return {worst <= 1e-9, fmt("%g products, max |J| above n_A + n_B = %.3g (tol 1e-9)", cases, worst)};
}

Outcome witness_soundness() {
  int unsound = 0;
  int phase_total = 0;
  int phase_exact = 0;
  for (const auto& w : g_witnessed) {
    const unsigned bound = particle_number_witness(w.dist).particle_lower_bound;
    unsound += bound > w.k;
    if (w.phase_strategy) {
      ++phase_total;
      phase_exact += bound == w.k;
    }
  }
  return {unsound == 0 && phase_exact == phase_total && phase_total > 0,
          fmt("%g simulated scenarios, %g with bound > k, phase strategies exact %g", static_cast<double>(g_witnessed.size()),
              unsound, phase_exact) +
              "/" + std::to_string(phase_total)};
}

Outcome determinism() {
  int passed = 0;
  int identical = 0;
  std::string failures;
  const auto files = list_scenarios(PARITY_SCENARIO_DIR);
  for (const auto& file : files) {
    const Scenario sc = load_scenario(file);
    std::ifstream in(file.parent_path() / "golden" / (sc.name + ".report.jsonl"));
    std::ostringstream ss;
    ss << in.rdbuf();
    const RunResult first = run_scenario(sc);
    const RunResult second = run_scenario(sc);
    const bool ok = !ss.str().empty() && compare_reports(first.records, parse_report(ss.str()), 1e-9).pass;
    passed += ok;
    identical += render_report(first.records) == render_report(second.records);
    if (!ok) failures += " " + sc.name;
  }
  const int n = static_cast<int>(files.size());
  std::string detail = std::to_string(passed) + "/" + std::to_string(n) + " goldens verified, " +
                       std::to_string(identical) + "/" + std::to_string(n) + " byte-identical reruns";
  if (!failures.empty()) detail += ", failing:" + failures;
  return {n > 0 && passed == n && identical == n, detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"binary phase strategy", binary_phase},
      {"d-ary PGM strategy", dary_phase},
      {"single-system cap", single_system_cap},
      {"two-system cap", two_system_cap},
      {"two-system achievability", paired_phase},
      {"classical ladder", classical_ladder},
      {"game/dual equivalence", duality},
      {"algebraic order", algebraic_order_soundness},
      {"composition bound", composition_bound},
      {"product decoupling", product_decoupling},
      {"witness soundness", witness_soundness},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::printf("%-4s %s  %s: %s [%.1fs]\n", ("C" + std::to_string(i + 1)).c_str(), o.pass ? "PASS" : "FAIL",
                criteria[i].first, o.detail.c_str(), secs);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
