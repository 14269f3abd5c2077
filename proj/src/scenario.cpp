#include "parity/scenario.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "parity/random.hpp"

namespace parity {
namespace {

using nlohmann::json;

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ScenarioError(std::string("missing field '") + key + "'");
  return j.at(key);
}

template <class T>
T field(const json& j, const char* key) {
  try {
    return require(j, key).get<T>();
  } catch (const json::exception&) {
    throw ScenarioError(std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
T field_or(const json& j, const char* key, T fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return field<T>(j, key);
}

DitString dits_from_json(unsigned d, const json& j) {
  if (!j.is_array()) throw ScenarioError("dit string must be an array");
  return DitString(d, j.get<std::vector<unsigned>>());
}

json dits_to_json(const DitString& s) { return json(std::vector<unsigned>(s.digits().begin(), s.digits().end())); }

RandomProgramOptions program_options(const json& j, unsigned default_dim) {
  RandomProgramOptions o;
  o.internal_dim = field_or<unsigned>(j, "internal_dim", default_dim);
  o.max_kraus = field_or<unsigned>(j, "max_kraus", o.max_kraus);
  o.lossy = field_or<bool>(j, "lossy", o.lossy);
  return o;
}

std::uint64_t row_seed(std::uint64_t seed, std::size_t row) {
  return seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(row + 1);
}

// Runs fn(i) for every row in parallel and rethrows the first failure (in row
// order) on the calling thread.
template <class Fn>
void parallel_rows(std::size_t count, Fn fn) {
  std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(count); ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// A distribution plus what is known about how it was produced.
struct Subject {
  ConditionalDistribution dist;
  std::optional<unsigned> true_k;
  std::optional<DitString> default_nu;
};

GameSpec game_for(const Scenario& sc, const Subject& subject) {
  const unsigned d = subject.dist.d();
  const unsigned m = subject.dist.m();
  if (sc.body.contains("game")) {
    const json& g = sc.body.at("game");
    const DitString nu = dits_from_json(d, require(g, "nu"));
    if (nu.size() != m) throw ScenarioError("game.nu has the wrong length");
    std::vector<unsigned> image(d);
    for (unsigned s = 0; s < d; ++s) image[s] = s;
    if (g.contains("f")) image = g.at("f").get<std::vector<unsigned>>();
    return GameSpec(nu, Permutation(image), field_or<unsigned>(g, "k", subject.true_k.value_or(1)));
  }
  if (subject.default_nu && subject.default_nu->weight() == m)
    return GameSpec(*subject.default_nu, Permutation::identity(d), subject.true_k.value_or(1));
  return GameSpec::unit(d, m, subject.true_k.value_or(1));
}

Subject strategy_subject(const Scenario& sc, std::uint64_t seed) {
  const std::string which = field<std::string>(sc.body, "strategy");
  const json params = sc.body.value("params", json::object());
  std::optional<DitString> nu;
  auto nu_param = [&](unsigned d, unsigned m) {
    nu = params.contains("nu") ? dits_from_json(d, params.at("nu")) : DitString::unit(d, m);
    return *nu;
  };
  std::optional<Strategy> strategy;
  if (which == "binary_phase") {
    strategy = binary_phase_strategy();
  } else if (which == "dary_phase") {
    const auto d = field<unsigned>(params, "d");
    strategy = dary_phase_strategy(d, nu_param(d, 2));
  } else if (which == "paired_phase") {
    const auto d = field_or<unsigned>(params, "d", 2);
    strategy = paired_phase_strategy(nu_param(d, field_or<unsigned>(params, "m", 4)));
  } else if (which == "classical_counting") {
    const auto d = field<unsigned>(params, "d");
    const auto m = field<unsigned>(params, "m");
    strategy = classical_counting_strategy(field<unsigned>(params, "k"), m, d, nu_param(d, m));
  } else if (which == "random_pgm") {
    const auto d = field<unsigned>(params, "d");
    strategy = random_pgm_strategy(nu_param(d, field_or<unsigned>(params, "m", 2)), program_options(params, 2), seed);
  } else {
    throw ScenarioError("unknown strategy '" + which + "'");
  }
  if (field_or<bool>(sc.body, "dephase", false)) strategy = dephased(*strategy);
  return Subject{run_strategy(*strategy), strategy->k, nu};
}

Subject raw_subject(const Scenario& sc, std::uint64_t seed) {
  const json& hj = require(sc.body, "hilbert");
  const auto k = field<unsigned>(hj, "k");
  const auto m = field<unsigned>(hj, "m");
  const auto dims = field_or<std::vector<unsigned>>(hj, "internal_dims", std::vector<unsigned>(k, 1));
  const PathedHilbert hilbert(k, m, dims);
  const auto d = field<unsigned>(sc.body, "d");
  if (!is_prime(d)) throw DomainError("raw scenario: d must be prime");

  Rng rng = make_rng(seed);
  const std::uint64_t prep_seed = rng();
  const std::uint64_t program_seed = rng();
  const std::uint64_t povm_seed = rng();

  const json& pj = require(sc.body, "prep");
  std::optional<DensityState> prep;
  if (pj.contains("ket")) {
    std::vector<Complex> ket;
    for (const json& c : pj.at("ket")) ket.push_back(complex_from_json(c));
    if (ket.size() != hilbert.dimension()) throw DomainError("raw scenario: ket has the wrong length");
    prep = DensityState::pure(hilbert, ket);
  } else if (pj.contains("rho")) {
    prep = DensityState(hilbert, matrix_from_json(pj.at("rho")));
  } else if (pj.contains("random")) {
    prep = random_state(hilbert, prep_seed, field_or<std::size_t>(pj.at("random"), "rank", 2));
  } else {
    throw ScenarioError("prep needs 'ket', 'rho' or 'random'");
  }
  prep->validate_positive();
  if (field_or<bool>(sc.body, "dephase", false)) prep = classical_dephase(*prep);

  auto kraus_table = [](const json& j) {
    std::vector<std::vector<KrausList>> ops;
    for (const json& outer : j) {
      std::vector<KrausList> row;
      for (const json& list : outer) {
        KrausList kl;
        for (const json& mat : list) kl.push_back(matrix_from_json(mat));
        row.push_back(std::move(kl));
      }
      ops.push_back(std::move(row));
    }
    return ops;
  };
  const json& gj = require(sc.body, "program");
  std::optional<BoxProgram> program;
  if (gj.contains("local")) {
    program = BoxProgram::local(m, d, kraus_table(gj.at("local")));
  } else if (gj.contains("joint")) {
    program = BoxProgram::joint(m, d, k, kraus_table(gj.at("joint")));
  } else if (gj.contains("random_local")) {
    program = random_local_program(m, d, program_options(gj.at("random_local"), dims.front()), program_seed);
  } else if (gj.contains("random_joint")) {
    program = random_joint_program(hilbert, d, program_options(gj.at("random_joint"), 1), program_seed);
  } else {
    throw ScenarioError("program needs 'local', 'joint', 'random_local' or 'random_joint'");
  }

  const auto fold = field_or<unsigned>(sc.body, "fold_outcome", 0);
  const json& vj = require(sc.body, "povm");
  std::optional<Povm> povm;
  std::optional<DitString> nu;
  if (vj.contains("effects")) {
    povm = Povm{};
    for (const json& e : vj.at("effects")) povm->effects.push_back(matrix_from_json(e));
  } else if (vj.contains("pgm")) {
    nu = dits_from_json(d, require(vj.at("pgm"), "nu"));
    const auto family = modulo_average_states(*prep, *program, *nu);
    const std::vector<double> weights(d, 1.0 / d);
    povm = pretty_good_measurement(family, weights, fold);
  } else if (vj.contains("random")) {
    povm = random_povm(hilbert, d, povm_seed);
  } else {
    throw ScenarioError("povm needs 'effects', 'pgm' or 'random'");
  }
  ExperimentOptions options;
  options.fold_outcome = fold;
  return Subject{run_experiment(*prep, *program, *povm, d, m, options), k, nu};
}

Subject distribution_subject(const Scenario& sc, std::uint64_t seed, std::vector<json>& records) {
  const json& src = require(sc.body, "source");
  if (src.contains("table")) {
    const json& t = src.at("table");
    std::vector<double> table;
    for (const json& row : require(t, "rows"))
      for (const json& v : row) table.push_back(v.get<double>());
    return Subject{ConditionalDistribution(field<unsigned>(t, "m"), field<unsigned>(t, "d"), std::move(table)), {}, {}};
  }
  if (src.contains("uniform")) {
    const json& u = src.at("uniform");
    return Subject{ConditionalDistribution::uniform(field<unsigned>(u, "m"), field<unsigned>(u, "d")), {}, {}};
  }
  if (src.contains("synthetic")) {
    const json& s = src.at("synthetic");
    SyntheticDistribution syn = synthesize_order_n_distribution(field<unsigned>(s, "m"), field<unsigned>(s, "d"),
                                                                field<unsigned>(s, "n"), seed);
    records.push_back({{"record", "synthetic"},
                       {"requested_order", syn.requested_order},
                       {"exact_order_achieved", syn.exact_order_achieved},
                       {"mixing", syn.mixing}});
    return Subject{std::move(syn.dist), {}, {}};
  }
  throw ScenarioError("source needs 'table', 'uniform' or 'synthetic'");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void analyse(const Scenario& sc, const Subject& subject, std::vector<json>& records, std::string& csv) {
  const ConditionalDistribution& dist = subject.dist;
  const GameSpec spec = game_for(sc, subject);
  if (spec.m() != dist.m() || spec.d() != dist.d()) throw ScenarioError("game does not match the distribution");
  records.push_back({{"record", "game"},
                     {"m", dist.m()},
                     {"d", dist.d()},
                     {"nu", dits_to_json(spec.nu)},
                     {"f", std::vector<unsigned>(spec.f.image().begin(), spec.f.image().end())},
                     {"k", spec.k},
                     {"win_probability", win_probability(dist, spec)},
                     {"interference_term", interference_term(dist, spec)}});

  const InterferenceReport report = build_report(dist, sc.witness, sc.witness_tol);
  for (const auto& [nu, value] : report.game_terms)
    records.push_back(
        {{"record", "game_term"}, {"nu", dits_to_json(DitString::from_index(dist.d(), dist.m(), nu))}, {"value", value}});
  if (sc.csv) csv = "m,d,nu,b,abs_dual,interference\n";
  for (const auto& [key, value] : report.dual_terms) {
    const DitString nu = DitString::from_index(dist.d(), dist.m(), key.first);
    records.push_back({{"record", "dual_term"},
                       {"nu", dits_to_json(nu)},
                       {"b", key.second},
                       {"re", value.real()},
                       {"im", value.imag()},
                       {"abs", std::abs(value)}});
    if (sc.csv) {
      std::string digits;
      for (unsigned v : nu.digits()) digits += std::to_string(v);
      csv += std::to_string(dist.m()) + "," + std::to_string(dist.d()) + "," + digits + "," +
             std::to_string(key.second) + "," + format_double(std::abs(value)) + "," +
             format_double(report.game_terms.at(key.first)) + "\n";
    }
  }
  json summary{{"record", "summary"}, {"m", dist.m()}, {"d", dist.d()}, {"algebraic_order", report.algebraic_order}};
  summary["witness_particles"] = report.witness_particles ? json(*report.witness_particles) : json(nullptr);
  summary["true_k"] = subject.true_k ? json(*subject.true_k) : json(nullptr);
  records.push_back(std::move(summary));
}

void composition_rows(const Scenario& sc, std::uint64_t seed, std::vector<json>& records) {
  const auto moduli = field_or<std::vector<unsigned>>(sc.body, "moduli", {2, 3, 5});
  const auto count = field_or<unsigned>(sc.body, "count", 200);
  const auto samples = composition_sweep(moduli, count, seed, program_options(sc.body, 2));
  unsigned violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const CompositionSample& s = samples[i];
    const double margin = s.composed - s.bound;
    const bool holds = margin >= -1e-9;
    violations += holds ? 0 : 1;
    min_margin = std::min(min_margin, margin);
    records.push_back({{"record", "composition_row"},
                       {"index", i},
                       {"d", s.d},
                       {"nu_a", dits_to_json(s.nu_a)},
                       {"nu_b", dits_to_json(s.nu_b)},
                       {"seed_a", s.seed_a},
                       {"seed_b", s.seed_b},
                       {"q_a", s.q_a},
                       {"q_b", s.q_b},
                       {"composed", s.composed},
                       {"bound", s.bound},
                       {"bound_holds", holds}});
  }
  records.push_back({{"record", "sweep_summary"},
                     {"rows", samples.size()},
                     {"bound_violations", violations},
                     {"min_margin", samples.empty() ? 0.0 : min_margin}});
}

void random_program_rows(const Scenario& sc, std::uint64_t seed, std::vector<json>& records) {
  const auto k = field_or<unsigned>(sc.body, "k", 1);
  const auto m = field_or<unsigned>(sc.body, "m", 3);
  const auto moduli = field_or<std::vector<unsigned>>(sc.body, "moduli", {2});
  const auto count = field_or<unsigned>(sc.body, "count", 10);
  const bool dephase = field_or<bool>(sc.body, "dephase", false);
  const RandomProgramOptions opts = program_options(sc.body, 2);
  if (moduli.empty()) throw ScenarioError("random_programs sweep needs at least one modulus");
  const PathedHilbert hilbert(k, m, std::vector<unsigned>(k, opts.internal_dim));

  std::vector<json> rows(count);
  parallel_rows(count, [&](std::size_t i) {
    const unsigned d = moduli[i % moduli.size()];
    Rng rng = make_rng(row_seed(seed, i));
    const std::uint64_t prep_seed = rng();
    const std::uint64_t program_seed = rng();
    const std::uint64_t povm_seed = rng();
    DensityState prep = random_state(hilbert, prep_seed, 2);
    if (dephase) prep = classical_dephase(prep);
    const BoxProgram program = k == 1 ? random_local_program(m, d, opts, program_seed)
                                      : random_joint_program(hilbert, d, opts, program_seed);
    const ConditionalDistribution dist = run_experiment(prep, program, random_povm(hilbert, d, povm_seed), d, m);
    const FourierSpectrum spectrum = fourier_spectrum(dist);
    rows[i] = {{"record", "random_program_row"},
               {"index", i},
               {"d", d},
               {"k", k},
               {"m", m},
               {"algebraic_order", algebraic_order(spectrum)},
               {"max_dual_by_weight", max_dual_by_weight(spectrum)},
               {"collapse_spread", average_state_spread(prep, program, DitString::unit(d, m))},
               {"witness_particles", particle_number_witness(dist, sc.witness_tol).particle_lower_bound}};
  });
  for (json& r : rows) records.push_back(std::move(r));
  records.push_back({{"record", "sweep_summary"}, {"rows", count}});
}

void compare_value(const json& a, const json& e, double tol, const std::string& path, std::vector<std::string>& out) {
  if (a.is_number() && e.is_number()) {
    const double x = a.get<double>();
    const double y = e.get<double>();
    if (!(std::abs(x - y) <= tol)) out.push_back(path + ": expected " + e.dump() + ", got " + a.dump());
    return;
  }
  if (a.type() != e.type()) {
    out.push_back(path + ": type differs (expected " + e.dump() + ", got " + a.dump() + ")");
    return;
  }
  if (a.is_object()) {
    std::set<std::string> keys;
    for (auto it = a.begin(); it != a.end(); ++it) keys.insert(it.key());
    for (auto it = e.begin(); it != e.end(); ++it) keys.insert(it.key());
    for (const std::string& key : keys) {
      if (!a.contains(key) || !e.contains(key)) {
        out.push_back(path + "." + key + ": present on one side only");
        continue;
      }
      compare_value(a.at(key), e.at(key), tol, path + "." + key, out);
    }
  } else if (a.is_array()) {
    if (a.size() != e.size()) {
      out.push_back(path + ": array length differs");
      return;
    }
    for (std::size_t i = 0; i < a.size(); ++i) compare_value(a[i], e[i], tol, path + "[" + std::to_string(i) + "]", out);
  } else if (a != e) {
    out.push_back(path + ": expected " + e.dump() + ", got " + a.dump());
  }
}

}  // namespace

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ScenarioError("complex number must be [re, im] or a real number");
}

ComplexMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ScenarioError("matrix must be a non-empty array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].size();
  std::vector<Complex> entries;
  entries.reserve(rows * cols);
  for (const json& row : j) {
    if (!row.is_array() || row.size() != cols) throw ScenarioError("matrix rows have different lengths");
    for (const json& c : row) entries.push_back(complex_from_json(c));
  }
  return ComplexMatrix(rows, cols, std::move(entries));
}

json matrix_to_json(const ComplexMatrix& m) {
  json out = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    out.push_back(std::move(row));
  }
  return out;
}

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object");
  if (field<int>(doc, "schema_version") != kSchemaVersion)
    throw ScenarioError("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
  Scenario sc;
  sc.name = field<std::string>(doc, "name");
  if (sc.name.empty()) throw ScenarioError("scenario name is empty");
  sc.kind = field<std::string>(doc, "kind");
  static const std::set<std::string> kinds{"strategy", "raw", "distribution", "sweep"};
  if (!kinds.contains(sc.kind)) throw ScenarioError("unknown kind '" + sc.kind + "'");
  sc.seed = field_or<std::uint64_t>(doc, "seed", 0);
  sc.witness = field_or<bool>(doc, "witness", true);
  sc.witness_tol = field_or<double>(doc, "witness_tol", kChannelTol);
  sc.csv = field_or<bool>(doc, "csv", true);
  sc.body = doc;
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open " + path.string());
  try {
    return parse_scenario(json::parse(in));
  } catch (const json::exception& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

RunResult run_scenario(const Scenario& sc, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const std::uint64_t seed = options.seed.value_or(sc.seed);
  RunResult result;
  result.records.push_back({{"record", "header"},
                            {"schema_version", kSchemaVersion},
                            {"scenario", sc.name},
                            {"kind", sc.kind},
                            {"seed", seed}});
  try {
    if (sc.kind == "sweep") {
      const std::string which = field<std::string>(sc.body, "sweep");
      if (which == "composition")
        composition_rows(sc, seed, result.records);
      else if (which == "random_programs")
        random_program_rows(sc, seed, result.records);
      else
        throw ScenarioError("unknown sweep '" + which + "'");
    } else {
      std::optional<Subject> subject;
      if (sc.kind == "strategy")
        subject = strategy_subject(sc, seed);
      else if (sc.kind == "raw")
        subject = raw_subject(sc, seed);
      else
        subject = distribution_subject(sc, seed, result.records);
      analyse(sc, *subject, result.records, result.csv);
    }
  } catch (const json::exception& e) {
    throw ScenarioError(sc.name + ": " + e.what());
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

std::string render_report(const std::vector<json>& records) {
  std::string out;
  for (const json& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

std::vector<json> parse_report(const std::string& text) {
  std::vector<json> out;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw ScenarioError("report line " + std::to_string(number) + ": " + e.what());
    }
  }
  return out;
}

void write_outputs(const Scenario& sc, const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& file, const std::string& text) {
    std::ofstream out(dir / file, std::ios::binary);
    if (!out) throw ScenarioError("cannot write " + (dir / file).string());
    out << text;
  };
  write(sc.name + ".report.jsonl", render_report(result.records));
  if (!result.csv.empty()) write(sc.name + ".csv", result.csv);
  const json timing{{"scenario", sc.name}, {"wall_seconds", result.wall_seconds}, {"threads", omp_get_max_threads()}};
  write(sc.name + ".timing.json", timing.dump() + "\n");
}

VerifyResult compare_reports(const std::vector<json>& actual, const std::vector<json>& expected, double tol) {
  VerifyResult v;
  if (actual.size() != expected.size())
    v.mismatches.push_back("record count differs: expected " + std::to_string(expected.size()) + ", got " +
                           std::to_string(actual.size()));
  const std::size_t n = std::min(actual.size(), expected.size());
  for (std::size_t i = 0; i < n; ++i) compare_value(actual[i], expected[i], tol, "line " + std::to_string(i + 1), v.mismatches);
  v.pass = v.mismatches.empty();
  return v;
}

std::vector<std::filesystem::path> list_scenarios(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> out;
  if (!std::filesystem::is_directory(dir)) return out;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".scenario") out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

json strategy_scenario(const std::string& name, const std::string& strategy, const json& params) {
  return {{"schema_version", kSchemaVersion}, {"name", name}, {"kind", "strategy"}, {"strategy", strategy},
          {"params", params}};
}

json strategy_to_raw_scenario(const std::string& name, const Strategy& s) {
  const PathedHilbert& h = s.prep.hilbert();
  json program = json::array();
  for (const auto& outer : s.program.operators()) {
    json row = json::array();
    for (const KrausList& list : outer) {
      json kl = json::array();
      for (const ComplexMatrix& b : list) kl.push_back(matrix_to_json(b));
      row.push_back(std::move(kl));
    }
    program.push_back(std::move(row));
  }
  json effects = json::array();
  for (const ComplexMatrix& e : s.povm.effects) effects.push_back(matrix_to_json(e));
  return {{"schema_version", kSchemaVersion},
          {"name", name},
          {"kind", "raw"},
          {"strategy", s.name},
          {"hilbert",
           {{"k", h.systems()},
            {"m", h.paths()},
            {"internal_dims", std::vector<unsigned>(h.internal_dims().begin(), h.internal_dims().end())}}},
          {"d", s.d},
          {"prep", {{"rho", matrix_to_json(s.prep.rho())}}},
          {"program", {{s.program.is_joint() ? "joint" : "local", program}}},
          {"povm", {{"effects", effects}}},
          {"fold_outcome", s.fold_outcome}};
}

}  // namespace parity
