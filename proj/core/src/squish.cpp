#include "squish/squish.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <set>

#include "squish/ranking.hpp"
#include "squish/rdm.hpp"

namespace squish {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename Enum, std::size_t N>
Enum parse_enum(const std::string& name, const std::pair<const char*, Enum> (&table)[N], const char* what) {
  for (const auto& [s, e] : table)
    if (name == s) return e;
  throw DomainError(std::string("unknown ") + what + " '" + name + "'");
}

template <typename Enum, std::size_t N>
std::string enum_name(Enum value, const std::pair<const char*, Enum> (&table)[N]) {
  for (const auto& [s, e] : table)
    if (e == value) return s;
  return "?";
}

const std::pair<const char*, SquishMode> kModes[] = {
    {"squish_nv", SquishMode::squish_nv},       {"squish_v", SquishMode::squish_v},
    {"benchmark1", SquishMode::benchmark1},     {"benchmark2", SquishMode::benchmark2},
    {"coeff_baseline", SquishMode::coeff_baseline}, {"one_shot", SquishMode::one_shot},
    {"multi_ref", SquishMode::multi_ref}};
const std::pair<const char*, ConvergenceRef> kRefs[] = {{"self", ConvergenceRef::self},
                                                        {"exact", ConvergenceRef::exact}};
const std::pair<const char*, RankScheme> kSchemes[] = {{"energetic", RankScheme::energetic},
                                                       {"coefficient", RankScheme::coefficient}};

std::vector<std::vector<double>> amplitudes_of(const std::vector<CiState>& states) {
  std::vector<std::vector<double>> out;
  for (const auto& s : states) out.push_back(s.amplitudes);
  return out;
}

// Round-robin over the per-state rankings until `want` distinct classes are chosen.
std::vector<TermKey> merge_round_robin(const std::vector<RankedList>& lists, std::size_t want) {
  std::vector<TermKey> out;
  std::set<TermKey> seen;
  std::vector<std::size_t> cursor(lists.size(), 0);
  bool progressed = true;
  while (out.size() < want && progressed) {
    progressed = false;
    for (std::size_t j = 0; j < lists.size() && out.size() < want; ++j) {
      auto& c = cursor[j];
      while (c < lists[j].size() && seen.count(lists[j][c].key)) ++c;
      if (c == lists[j].size()) continue;
      seen.insert(lists[j][c].key);
      out.push_back(lists[j][c].key);
      ++c;
      progressed = true;
    }
  }
  return out;
}

void write_audit(const std::string& dir, std::size_t k, const TermSet& terms) {
  std::filesystem::create_directories(dir);
  char name[32];
  std::snprintf(name, sizeof name, "terms_k%04zu.txt", k);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream f(path);
  if (!f) throw IoError("cannot write audit file " + path.string());
  write_term_set(terms, f);
}

std::vector<CiState> solve(const SparseSymMatrix& mat, std::size_t J, double tol,
                           const std::vector<std::vector<double>>& previous, std::size_t k) {
  EigenOptions opts;
  opts.guesses = previous;
  if (!previous.empty()) opts.previous = &previous.front();
  try {
    return lowest_eigenpairs(mat, J, tol, opts);
  } catch (const ConvergenceError& e) {
    throw ConvergenceError("iteration " + std::to_string(k) + ": " + e.what(), e.best_residual());
  }
}

SquishTrace run_loop(const IntegralTable& table, const SquishConfig& cfg, std::size_t J) {
  cfg.validate();
  const auto partition = classify_orbitals(table.header());
  const auto basis = enumerate_basis(Sector::from_header(table.header()));
  if (J > basis.size()) throw DomainError("more target states than determinants");
  const EnergyKind kind = cfg.energy_kind();
  const RankScheme scheme = cfg.scheme();

  SquishTrace trace;
  trace.basis_size = basis.size();
  trace.e_hf = hf_energy(table, partition);

  const bool need_ref = cfg.reference || cfg.convergence == ConvergenceRef::exact || cfg.ranks_with_exact_state();
  std::vector<CiState> ref;
  std::vector<RdmPair> ref_rdms;
  if (need_ref) {
    ref = solve(build_matrix(basis, table), J, cfg.solver_tol, {}, 0);
    for (const auto& s : ref) {
      trace.e_fci.push_back(s.energy + table.core_energy());
      if (cfg.ranks_with_exact_state()) ref_rdms.push_back(build_rdms(s, basis));
    }
  }

  TermSet terms = initial_term_set(partition, cfg.initial_set, cfg.grouping);
  trace.pool_classes_initial = terms.excluded_classes().size();
  std::vector<std::vector<double>> previous;
  std::vector<double> prev_energies;

  for (std::size_t k = 0;; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto states = solve(build_matrix(basis, table, terms), J, cfg.solver_tol, previous, k);
    std::vector<RdmPair> rdms;
    for (const auto& s : states) rdms.push_back(build_rdms(s, basis));

    IterationRecord rec;
    rec.k = k;
    rec.included_tuples = terms.included_tuples(TermKind::two_body);
    rec.vvvv_tuples = vvvv_included(terms, partition);
    rec.e_nv = energy_from_rdms(rdms[0], table, terms);
    rec.e_v = energy_from_rdms(rdms[0], table);
    for (std::size_t j = 0; j < J; ++j)
      rec.state_energies.push_back(j == 0 ? (kind == EnergyKind::v ? rec.e_v : rec.e_nv)
                                          : (kind == EnergyKind::v ? energy_from_rdms(rdms[j], table)
                                                                   : energy_from_rdms(rdms[j], table, terms)));
    const double e = rec.state_energies[0];
    rec.e_corr = e - trace.e_hf;
    rec.err_exact = need_ref ? std::abs(e - trace.e_fci[0]) : kNaN;
    rec.overlap = need_ref ? overlap(states[0], basis, ref[0], basis) : kNaN;
    rec.err_self = kNaN;
    if (k > 0) {
      rec.err_self = 0.0;
      for (std::size_t j = 0; j < J; ++j)
        rec.err_self = std::max(rec.err_self, std::abs(rec.state_energies[j] - prev_energies[j]));
    }
    rec.one_norm = one_norm(truncated_table(table, terms));
    if (cfg.audit_dir) write_audit(*cfg.audit_dir, k, terms);

    bool converged = true;
    for (std::size_t j = 0; j < J; ++j) {
      const double gap = cfg.convergence == ConvergenceRef::exact
                             ? std::abs(rec.state_energies[j] - trace.e_fci[j])
                             : (k > 0 ? std::abs(rec.state_energies[j] - prev_energies[j]) : kNaN);
      if (!(gap < cfg.delta)) converged = false;
    }
    prev_energies = rec.state_energies;
    previous = amplitudes_of(states);
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    trace.records.push_back(rec);
    trace.final_terms = terms;

    if (converged) {
      trace.termination = Termination::converged;
      return trace;
    }
    const TermSet pool = terms.complement();
    const auto pool_classes = pool.included_classes();
    if (pool_classes.empty()) {
      trace.termination = Termination::exhausted;
      return trace;
    }
    if (trace.records.size() >= cfg.max_iterations) {
      trace.termination = Termination::max_iterations;
      throw TimeoutError("no convergence within " + std::to_string(cfg.max_iterations) + " iterations", trace);
    }

    std::vector<RankedList> ranked;
    if (scheme == RankScheme::coefficient) {
      ranked.push_back(rank_coefficient(table, pool));
    } else {
      const auto& source = cfg.ranks_with_exact_state() ? ref_rdms : rdms;
      for (const auto& r : source) ranked.push_back(rank_energetic(term_contributions(r, table, pool)));
    }
    const std::size_t want = std::min(cfg.schedule.at(k), pool_classes.size());
    for (const auto& key : merge_round_robin(ranked, want)) terms.insert(key);
  }
}

}  // namespace

SquishMode parse_mode(const std::string& name) { return parse_enum(name, kModes, "mode"); }
std::string to_string(SquishMode mode) { return enum_name(mode, kModes); }
ConvergenceRef parse_convergence(const std::string& name) { return parse_enum(name, kRefs, "convergence reference"); }
std::string to_string(ConvergenceRef ref) { return enum_name(ref, kRefs); }
std::string to_string(EnergyKind kind) { return kind == EnergyKind::v ? "v" : "nv"; }
RankScheme parse_scheme(const std::string& name) { return parse_enum(name, kSchemes, "ranking scheme"); }
std::string to_string(RankScheme scheme) { return enum_name(scheme, kSchemes); }

std::string to_string(Termination t) {
  switch (t) {
    case Termination::converged: return "converged";
    case Termination::exhausted: return "exhausted";
    case Termination::max_iterations: return "max_iterations";
  }
  return "?";
}

std::size_t MSchedule::at(std::size_t k) const {
  const double m = static_cast<double>(m0) * std::pow(growth, static_cast<double>(k / grow_every));
  if (m >= 1e18) return static_cast<std::size_t>(1e18);
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(m + 1e-9)));
}

void SquishConfig::validate() const {
  if (schedule.m0 < 1) throw DomainError("m0 must be at least 1");
  if (!(schedule.growth >= 1.0)) throw DomainError("growth factor must be at least 1");
  if (schedule.grow_every < 1) throw DomainError("grow_every must be at least 1");
  if (!(delta > 0)) throw DomainError("delta must be positive");
  if (states < 1) throw DomainError("at least one target state is required");
  if (max_iterations < 1) throw DomainError("max_iterations must be at least 1");
  if (!(solver_tol > 0)) throw DomainError("solver tolerance must be positive");
  if (mode == SquishMode::one_shot) throw DomainError("one_shot runs through run_one_shot");
  if (states > 1 && mode != SquishMode::multi_ref) throw DomainError("several target states need multi_ref mode");
}

EnergyKind SquishConfig::energy_kind() const {
  if (energy) return *energy;
  return (mode == SquishMode::squish_nv || mode == SquishMode::benchmark1) ? EnergyKind::nv : EnergyKind::v;
}

RankScheme SquishConfig::scheme() const {
  return mode == SquishMode::coeff_baseline ? RankScheme::coefficient : RankScheme::energetic;
}

bool SquishConfig::ranks_with_exact_state() const {
  return mode == SquishMode::benchmark1 || mode == SquishMode::benchmark2;
}

SquishTrace run_squish(const IntegralTable& table, const SquishConfig& config) {
  return run_loop(table, config, config.mode == SquishMode::multi_ref ? config.states : 1);
}

SquishTrace run_multi_ref(const IntegralTable& table, const SquishConfig& config) {
  SquishConfig cfg = config;
  cfg.mode = SquishMode::multi_ref;
  return run_loop(table, cfg, cfg.states);
}

OneShotResult run_one_shot(const IntegralTable& table, const OneShotConfig& config, const StateVector* approx_state) {
  const auto partition = classify_orbitals(table.header());
  const auto basis = enumerate_basis(Sector::from_header(table.header()));
  const auto exact = solve(build_matrix(basis, table), 1, config.solver_tol, {}, 0).front();
  const RdmPair exact_rdms = build_rdms(exact, basis);

  std::vector<double> approx;
  if (approx_state) {
    if (!(approx_state->basis.sector() == basis.sector())) throw DomainError("approximate state is in another sector");
    approx = embed(approx_state->state, approx_state->basis, basis);
  } else {
    const TermSet degraded = initial_term_set(partition, config.degraded_set, config.grouping);
    approx = solve(build_matrix(basis, table, degraded), 1, config.solver_tol, {}, 0).front().amplitudes;
  }
  const RdmPair approx_rdms = build_rdms(approx, basis);

  OneShotResult out;
  out.e_fci = exact.energy + table.core_energy();
  out.approx_energy = energy_from_rdms(approx_rdms, table);

  TermSet terms = initial_term_set(partition, config.initial_set, config.grouping);
  const TermSet pool = terms.complement();
  const RankedList ranked = config.scheme == RankScheme::energetic
                                ? rank_energetic(term_contributions(approx_rdms, table, pool))
                                : rank_coefficient(table, pool);
  for (const auto& e : ranked) out.order.push_back(e.key);

  std::vector<std::size_t> budgets = config.budgets;
  if (budgets.empty())
    for (std::size_t m = 0; m <= ranked.size(); ++m) budgets.push_back(m);
  std::sort(budgets.begin(), budgets.end());
  budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());

  std::size_t added = 0;
  for (std::size_t m : budgets) {
    for (; added < std::min(m, ranked.size()); ++added) terms.insert(ranked[added].key);
    OneShotPoint pt;
    pt.m = m;
    pt.included_tuples = terms.included_tuples(TermKind::two_body);
    pt.vvvv_tuples = vvvv_included(terms, partition);
    pt.e_eval = energy_from_rdms(exact_rdms, table, terms);
    pt.error = std::abs(pt.e_eval - out.e_fci);
    if (!out.classes_to_accuracy && pt.error < kChemicalAccuracy) out.classes_to_accuracy = m;
    out.points.push_back(pt);
  }
  return out;
}

}  // namespace squish
