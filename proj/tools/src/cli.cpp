#include "squish_cli/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

#include "squish/asci.hpp"
#include "squish/error.hpp"
#include "squish/fcidump.hpp"
#include "squish/hamiltonian.hpp"
#include "squish/runtime.hpp"
#include "squish/shadows.hpp"
#include "squish/squish.hpp"

namespace squish::cli {

namespace {

using nlohmann::json;

std::string fmt_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

json real_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// Sends `fn` output to `path`, or to `fallback` when the path is empty.
void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  fn(f);
  if (!f) throw IoError("failed writing " + path);
}

struct SquishFlags {
  std::string fcidump;
  std::string mode = "squish_v";
  std::string initial_set = "no_vvvv";
  std::string grouping = "conjugate";
  std::size_t m0 = 2;
  double growth = 10.0;
  std::size_t grow_every = 3;
  double delta = 1e-6;
  std::string convergence = "self";
  std::size_t states = 1;
  std::size_t max_iterations = 200;
  double solver_tol = 1e-9;
  std::string energy;
  std::string out_csv;
  std::string out_json;
  std::string audit_dir;
  std::string state_file;
  std::string scheme = "energetic";
  std::vector<std::size_t> budgets;
  bool no_reference = false;
  bool no_timing = false;
};

struct CountsFlags {
  std::string fcidump;
  std::string synthetic;
  std::string initial_set = "no_vvvv";
  bool norms = false;
};

struct AsciFlags {
  std::string fcidump;
  std::vector<std::size_t> target_sizes{10, 50, 225};
  double delta = 1e-10;
  std::size_t max_iterations = 50;
  double solver_tol = 1e-10;
  std::string out_csv;
  std::string out_json;
};

struct BudgetFlags {
  std::string fcidump;
  int eta = 0;
  int n = 0;
  double epsilon = 0.01;
};

TermGrouping parse_grouping(const std::string& s) {
  return s == "permutational" ? TermGrouping::permutational : TermGrouping::conjugate;
}

json base_manifest(const std::string& subcommand) {
  return json{{"subcommand", subcommand}, {"tool_version", kToolVersion}, {"seed", nullptr},
              {"threads", max_threads()}};
}

SquishConfig to_config(const SquishFlags& f) {
  SquishConfig c;
  c.mode = parse_mode(f.mode);
  c.initial_set = parse_initial_set(f.initial_set);
  c.grouping = parse_grouping(f.grouping);
  c.schedule = {f.m0, f.growth, f.grow_every};
  c.delta = f.delta;
  c.convergence = parse_convergence(f.convergence);
  c.states = f.states;
  c.max_iterations = f.max_iterations;
  c.solver_tol = f.solver_tol;
  if (!f.energy.empty()) c.energy = f.energy == "v" ? EnergyKind::v : EnergyKind::nv;
  c.reference = !f.no_reference;
  if (!f.audit_dir.empty()) c.audit_dir = f.audit_dir;
  return c;
}

void write_trace_csv(const SquishTrace& t, bool timing, std::ostream& os) {
  os << "k,included_tuples,vvvv_tuples,E_nv,E_v,E_corr,err_exact,err_self,overlap,wall_ms\n";
  for (const auto& r : t.records) {
    os << r.k << ',' << r.included_tuples << ',' << r.vvvv_tuples << ',' << fmt_real(r.e_nv) << ','
       << fmt_real(r.e_v) << ',' << fmt_real(r.e_corr) << ',' << fmt_real(r.err_exact) << ','
       << fmt_real(r.err_self) << ',' << fmt_real(r.overlap) << ',' << fmt_real(timing ? r.wall_ms : 0.0) << '\n';
  }
}

int cmd_squish(const SquishFlags& f, std::ostream& out, std::ostream& err) {
  const IntegralTable table = read_fcidump(f.fcidump);
  json manifest = base_manifest("squish");
  manifest["inputs"] = {{"fcidump", f.fcidump}};
  if (!f.state_file.empty()) manifest["inputs"]["state_file"] = f.state_file;

  if (f.mode == "one_shot") {
    OneShotConfig oc;
    oc.scheme = parse_scheme(f.scheme);
    oc.budgets = f.budgets;
    oc.initial_set = parse_initial_set(f.initial_set);
    oc.grouping = parse_grouping(f.grouping);
    oc.solver_tol = f.solver_tol;
    manifest["config"] = {{"mode", "one_shot"},          {"scheme", to_string(oc.scheme)},
                          {"initial_set", f.initial_set}, {"grouping", f.grouping},
                          {"budgets", f.budgets},         {"solver_tol", f.solver_tol},
                          {"degraded_set", to_string(oc.degraded_set)}};
    std::optional<StateVector> approx;
    if (!f.state_file.empty()) approx = read_state(f.state_file, Sector::from_header(table.header()));
    const auto res = run_one_shot(table, oc, approx ? &*approx : nullptr);
    emit(f.out_csv, out, [&](std::ostream& os) {
      os << "m,included_tuples,vvvv_tuples,E_eval,err_exact\n";
      for (const auto& p : res.points)
        os << p.m << ',' << p.included_tuples << ',' << p.vvvv_tuples << ',' << fmt_real(p.e_eval) << ','
           << fmt_real(p.error) << '\n';
    });
    json summary{{"manifest", manifest},
                 {"approx_energy", res.approx_energy},
                 {"E_fci", res.e_fci},
                 {"pool_classes", res.order.size()},
                 {"classes_to_chemical_accuracy",
                  res.classes_to_accuracy ? json(*res.classes_to_accuracy) : json(nullptr)}};
    emit(f.out_json, out, [&](std::ostream& os) { os << summary.dump(2) << '\n'; });
    return kExitOk;
  }

  const SquishConfig cfg = to_config(f);
  manifest["config"] = {{"mode", to_string(cfg.mode)},
                        {"initial_set", to_string(cfg.initial_set)},
                        {"grouping", f.grouping},
                        {"m0", cfg.schedule.m0},
                        {"growth", cfg.schedule.growth},
                        {"grow_every", cfg.schedule.grow_every},
                        {"delta", cfg.delta},
                        {"convergence", to_string(cfg.convergence)},
                        {"states", cfg.states},
                        {"max_iterations", cfg.max_iterations},
                        {"solver_tol", cfg.solver_tol},
                        {"energy", to_string(cfg.energy_kind())},
                        {"reference", cfg.reference},
                        {"audit_dir", f.audit_dir.empty() ? json(nullptr) : json(f.audit_dir)}};

  SquishTrace trace;
  int code = kExitOk;
  try {
    trace = cfg.mode == SquishMode::multi_ref ? run_multi_ref(table, cfg) : run_squish(table, cfg);
  } catch (const TimeoutError& e) {
    err << "squish: " << e.what() << '\n';
    trace = e.trace();
    code = kExitTimeout;
  }
  emit(f.out_csv, out, [&](std::ostream& os) { write_trace_csv(trace, !f.no_timing, os); });

  const auto& last = trace.records.back();
  json summary{{"manifest", manifest},
               {"termination", to_string(trace.termination)},
               {"iterations", trace.records.size()},
               {"basis_size", trace.basis_size},
               {"final_included_tuples", last.included_tuples},
               {"final_vvvv_tuples", last.vvvv_tuples},
               {"final_E_nv", last.e_nv},
               {"final_E_v", last.e_v},
               {"final_state_energies", last.state_energies},
               {"final_err_exact", real_or_null(last.err_exact)},
               {"final_overlap", real_or_null(last.overlap)},
               {"final_one_norm", last.one_norm},
               {"E_hf", trace.e_hf},
               {"E_fci", trace.e_fci}};
  emit(f.out_json, out, [&](std::ostream& os) { os << summary.dump(2) << '\n'; });
  return code;
}

int cmd_counts(const CountsFlags& f, std::ostream& out) {
  OrbitalPartition part;
  std::optional<IntegralTable> table;
  if (!f.fcidump.empty()) {
    table = read_fcidump(f.fcidump);
    part = classify_orbitals(table->header());
  } else {
    int m = 0, nv = 0;
    char comma = 0;
    std::istringstream is(f.synthetic);
    if (!(is >> m >> comma >> nv) || comma != ',' || m < 1 || nv < 0 || nv > m)
      throw DomainError("--synthetic expects M,NV with 0 <= NV <= M");
    for (int p = 0; p < m; ++p) (p < m - nv ? part.occupied : part.virtual_orbitals).push_back(p);
  }
  const TermSet terms = initial_term_set(part, parse_initial_set(f.initial_set));
  const auto r = count_report(terms, part);
  out << "one_body_total " << r.one_body_total << '\n'
      << "two_body_total " << r.two_body_total << '\n'
      << "included_two_body " << r.included_two_body << '\n'
      << "excluded_two_body " << r.excluded_two_body << '\n'
      << "vvvv_included " << r.vvvv_included << '\n'
      << "vvvv_total " << r.vvvv_total << '\n';
  if (f.norms) {
    out << "one_norm_full " << fmt_real(one_norm(*table)) << '\n'
        << "one_norm_truncated " << fmt_real(one_norm(truncated_table(*table, terms))) << '\n';
  }
  return kExitOk;
}

int cmd_asci(const AsciFlags& f, std::ostream& out, std::ostream& err) {
  const IntegralTable table = read_fcidump(f.fcidump);
  AsciConfig cfg;
  cfg.target_sizes = f.target_sizes;
  cfg.delta = f.delta;
  cfg.max_iterations = f.max_iterations;
  cfg.solver_tol = f.solver_tol;
  const auto trace = run_asci(table, cfg);
  emit(f.out_csv, out, [&](std::ostream& os) {
    os << "k,space_size,E0,err_self\n";
    for (const auto& r : trace.records)
      os << r.k << ',' << r.space_size << ',' << fmt_real(r.e0) << ',' << fmt_real(r.err_self) << '\n';
  });
  json manifest = base_manifest("asci");
  manifest["inputs"] = {{"fcidump", f.fcidump}};
  manifest["config"] = {{"target_sizes", cfg.target_sizes},
                        {"delta", cfg.delta},
                        {"max_iterations", cfg.max_iterations},
                        {"solver_tol", cfg.solver_tol}};
  json summary{{"manifest", manifest},
               {"converged", trace.converged},
               {"iterations", trace.records.size()},
               {"final_space_size", trace.records.back().space_size},
               {"final_E0", trace.records.back().e0}};
  emit(f.out_json, out, [&](std::ostream& os) { os << summary.dump(2) << '\n'; });
  if (!trace.converged) {
    err << "asci: no convergence within " << cfg.max_iterations << " iterations\n";
    return kExitTimeout;
  }
  return kExitOk;
}

int cmd_budget(const BudgetFlags& f, std::ostream& out) {
  BudgetReport r;
  if (!f.fcidump.empty()) {
    r = budget_report(read_fcidump(f.fcidump).header(), f.epsilon);
  } else {
    r.query = {f.eta, f.n, f.epsilon};
    r.budget = measurement_budget(r.query);
    const double n = f.n;
    r.observables = n * n * n * n;
  }
  json j{{"eta", r.query.eta},
         {"n_spin_orbitals", r.query.n_spin_orbitals},
         {"epsilon", r.query.epsilon},
         {"budget", r.budget},
         {"observables", r.observables}};
  out << j.dump() << '\n';
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Wavefunction-informed Hamiltonian truncation toolkit", "squish"};
  app.require_subcommand(1);
  std::optional<int> threads;
  app.add_option("--threads", threads, "Cap on worker threads (fallback: SQUISH_THREADS)")->check(CLI::PositiveNumber);

  const std::vector<std::string> modes{"squish_nv", "squish_v",  "benchmark1", "benchmark2",
                                       "coeff_baseline", "one_shot", "multi_ref"};

  SquishFlags sf;
  auto* sq = app.add_subcommand("squish", "Run iterative truncation and write the trace");
  sq->add_option("--fcidump", sf.fcidump, "Integral file")->required()->check(CLI::ExistingFile);
  sq->add_option("--mode", sf.mode)->check(CLI::IsMember(modes))->capture_default_str();
  sq->add_option("--initial-set", sf.initial_set)->check(CLI::IsMember({"no_vvvv", "hf_minimal"}))->capture_default_str();
  sq->add_option("--grouping", sf.grouping)->check(CLI::IsMember({"conjugate", "permutational"}))->capture_default_str();
  sq->add_option("--m0", sf.m0)->check(CLI::PositiveNumber)->capture_default_str();
  sq->add_option("--growth", sf.growth)->check(CLI::Range(1.0, 1e9))->capture_default_str();
  sq->add_option("--grow-every", sf.grow_every)->check(CLI::PositiveNumber)->capture_default_str();
  sq->add_option("--delta", sf.delta)->check(CLI::PositiveNumber)->capture_default_str();
  sq->add_option("--convergence", sf.convergence)->check(CLI::IsMember({"self", "exact"}))->capture_default_str();
  sq->add_option("--states", sf.states, "Target states J (multi_ref)")->check(CLI::PositiveNumber)->capture_default_str();
  sq->add_option("--max-iterations", sf.max_iterations)->check(CLI::PositiveNumber)->capture_default_str();
  sq->add_option("--solver-tol", sf.solver_tol)->check(CLI::PositiveNumber)->capture_default_str();
  sq->add_option("--energy", sf.energy, "Override the mode's energy (nv|v)")->check(CLI::IsMember({"nv", "v"}));
  sq->add_option("--out-csv", sf.out_csv, "Trace CSV path (default stdout)");
  sq->add_option("--out-json", sf.out_json, "Summary JSON path (default stdout)");
  sq->add_option("--audit-dir", sf.audit_dir, "Directory for per-iteration term sets");
  sq->add_option("--state-file", sf.state_file, "Approximate state for one_shot")->check(CLI::ExistingFile);
  sq->add_option("--scheme", sf.scheme, "one_shot ranking")->check(CLI::IsMember({"energetic", "coefficient"}))->capture_default_str();
  sq->add_option("--budgets", sf.budgets, "one_shot class counts (default: all)")->delimiter(',');
  sq->add_flag("--no-reference", sf.no_reference, "Skip the exact reference unless the mode needs it");
  sq->add_flag("--no-timing", sf.no_timing, "Write wall_ms as 0 for byte-stable traces");

  CountsFlags cf;
  auto* co = app.add_subcommand("counts", "Term counts of the initial truncation");
  auto* co_file = co->add_option("--fcidump", cf.fcidump)->check(CLI::ExistingFile);
  auto* co_syn = co->add_option("--synthetic", cf.synthetic, "M,NV without integrals");
  co_file->excludes(co_syn);
  co->add_option("--initial-set", cf.initial_set)->check(CLI::IsMember({"no_vvvv", "hf_minimal"}))->capture_default_str();
  co->add_flag("--norms", cf.norms, "Also print the 1-norms (needs --fcidump)")->needs(co_file);

  AsciFlags af;
  auto* as = app.add_subcommand("asci", "Adaptive sampling CI from the Hartree-Fock determinant");
  as->add_option("--fcidump", af.fcidump)->required()->check(CLI::ExistingFile);
  as->add_option("--target-size", af.target_sizes, "Target sizes per iteration, last repeats")
      ->delimiter(',')
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  as->add_option("--delta", af.delta)->check(CLI::PositiveNumber)->capture_default_str();
  as->add_option("--max-iterations", af.max_iterations)->check(CLI::PositiveNumber)->capture_default_str();
  as->add_option("--solver-tol", af.solver_tol)->check(CLI::PositiveNumber)->capture_default_str();
  as->add_option("--out-csv", af.out_csv);
  as->add_option("--out-json", af.out_json);

  BudgetFlags bf;
  auto* bu = app.add_subcommand("budget", "Classical-shadows measurement budget");
  auto* bu_file = bu->add_option("--fcidump", bf.fcidump, "Take eta and N = 2 NORB from a header")->check(CLI::ExistingFile);
  auto* bu_eta = bu->add_option("--eta", bf.eta);
  auto* bu_n = bu->add_option("--n", bf.n, "Spin-orbital count");
  bu->add_option("--epsilon", bf.epsilon)->check(CLI::PositiveNumber)->capture_default_str();
  bu_file->excludes(bu_eta)->excludes(bu_n);
  bu_eta->needs(bu_n);
  bu_n->needs(bu_eta);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (co->parsed() && cf.fcidump.empty() && cf.synthetic.empty())
      throw CLI::RequiredError("counts needs --fcidump or --synthetic");
    if (bu->parsed() && bf.fcidump.empty() && !bu_eta->count())
      throw CLI::RequiredError("budget needs --eta and --n, or --fcidump");
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    set_num_threads(threads);
    if (sq->parsed()) return cmd_squish(sf, out, err);
    if (co->parsed()) return cmd_counts(cf, out);
    if (as->parsed()) return cmd_asci(af, out, err);
    return cmd_budget(bf, out);
  } catch (const Error& e) {
    err << "squish: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "squish: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace squish::cli
