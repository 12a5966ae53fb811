// Acceptance checks: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion...]   (no argument runs every criterion)

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "fock_oracle.hpp"
#include "random_system.hpp"
#include "squish/asci.hpp"
#include "squish/rdm.hpp"
#include "squish/shadows.hpp"
#include "squish/squish.hpp"
#include "squish_cli/cli.hpp"

using namespace squish;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

SquishTrace run_mode(const IntegralTable& t, SquishMode mode, double delta = kChemicalAccuracy) {
  SquishConfig c;
  c.mode = mode;
  c.convergence = ConvergenceRef::exact;
  c.delta = delta;
  return run_squish(t, c);
}

std::size_t final_vvvv(const SquishTrace& tr) { return tr.records.back().vvvv_tuples; }

bool in_window(std::size_t v, std::size_t lo, std::size_t hi) { return v >= lo && v <= hi; }

const SquishMode kIterative[] = {SquishMode::squish_nv, SquishMode::squish_v, SquishMode::benchmark1,
                                 SquishMode::benchmark2, SquishMode::coeff_baseline};

// ---- reproduction rows ----

Outcome truncation_lih() {
  Outcome o;
  const auto t = testsupport::load_fixture("lih_sto3g");
  const auto v = run_mode(t, SquishMode::squish_v), nv = run_mode(t, SquishMode::squish_nv);
  const auto& last = v.records.back();
  o.require(v.termination == Termination::converged, "variational run converged");
  o.require(in_window(final_vvvv(v), 5, 20), "variational vvvv " + std::to_string(final_vvvv(v)) + " in [5,20]");
  o.require(last.overlap >= 0.9999, "overlap " + fmt("%.8f", last.overlap) + " >= 0.9999");
  o.require(in_window(final_vvvv(nv), 5, 20), "non-variational vvvv " + std::to_string(final_vvvv(nv)) + " in [5,20]");
  return o;
}

Outcome truncation_h2() {
  Outcome o;
  const auto t = testsupport::load_fixture("h2_ccpvdz_6orb");
  const auto v = final_vvvv(run_mode(t, SquishMode::squish_v)), nv = final_vvvv(run_mode(t, SquishMode::squish_nv));
  o.require(v <= 12, "variational vvvv " + std::to_string(v) + " <= 12");
  o.require(in_window(nv, 28, 110), "non-variational vvvv " + std::to_string(nv) + " in [28,110]");
  o.require(v <= nv, "variational <= non-variational");
  return o;
}

Outcome truncation_h3p() {
  Outcome o;
  const auto t = testsupport::load_fixture("h3p_ccpvdz_6orb");
  const auto v = final_vvvv(run_mode(t, SquishMode::squish_v)), nv = final_vvvv(run_mode(t, SquishMode::squish_nv));
  o.require(v <= 32, "variational vvvv " + std::to_string(v) + " <= 32");
  o.require(nv <= 66, "non-variational vvvv " + std::to_string(nv) + " <= 66");
  return o;
}

// ---- counting ----

Outcome counting_identities() {
  Outcome o;
  auto check = [&](const std::string& synthetic, const std::vector<long long>& expected) {
    std::ostringstream out, err;
    const int code = cli::run({"squish", "counts", "--synthetic", synthetic}, out, err);
    std::map<std::string, long long> got;
    std::istringstream in(out.str());
    std::string key;
    long long v;
    while (in >> key >> v) got[key] = v;
    const std::vector<long long> actual{got["one_body_total"], got["two_body_total"], got["included_two_body"],
                                        got["excluded_two_body"]};
    std::string shown;
    for (auto x : actual) shown += (shown.empty() ? "" : "/") + std::to_string(x);
    o.require(code == 0 && actual == expected, synthetic + " -> " + shown);
  };
  check("72,67", {5184, 26873856, 6722735, 20151121});
  check("6,5", {36, 1296, 671, 625});
  return o;
}

// ---- ranking comparisons ----

Outcome ranking_superiority() {
  Outcome o;
  int strict = 0;
  for (const auto& name : testsupport::fixture_names()) {
    const auto t = testsupport::load_fixture(name);
    const auto en = final_vvvv(run_mode(t, SquishMode::squish_v));
    const auto co = final_vvvv(run_mode(t, SquishMode::coeff_baseline));
    o.require(en <= co, name + " energetic " + std::to_string(en) + " <= coefficient " + std::to_string(co));
    if (en < co) ++strict;
  }
  o.require(strict >= 2, "strict on " + std::to_string(strict) + "/3");
  return o;
}

Outcome benchmark_fidelity() {
  Outcome o;
  auto within2 = [](std::size_t a, std::size_t b) {
    return std::max(a, b) <= 2 * std::min(a, b);
  };
  for (const auto& name : testsupport::fixture_names()) {
    const auto t = testsupport::load_fixture(name);
    const auto nv = final_vvvv(run_mode(t, SquishMode::squish_nv)), b1 = final_vvvv(run_mode(t, SquishMode::benchmark1));
    const auto v = final_vvvv(run_mode(t, SquishMode::squish_v)), b2 = final_vvvv(run_mode(t, SquishMode::benchmark2));
    o.require(within2(nv, b1), name + " nv/b1 " + std::to_string(nv) + "/" + std::to_string(b1));
    o.require(within2(v, b2), name + " v/b2 " + std::to_string(v) + "/" + std::to_string(b2));
  }
  return o;
}

// ---- property suites ----

Outcome variational_bound() {
  Outcome o;
  std::size_t iterates = 0;
  double worst = INFINITY;
  for (const auto& name : testsupport::fixture_names()) {
    const auto t = testsupport::load_fixture(name);
    for (auto mode : kIterative)
      for (double delta : {kChemicalAccuracy, 1e-6}) {
        const auto tr = run_mode(t, mode, delta);
        for (const auto& r : tr.records) {
          worst = std::min(worst, r.e_v - tr.e_fci[0]);
          ++iterates;
        }
      }
  }
  o.require(worst >= -1e-9, std::to_string(iterates) + " iterates, min(E_v - E_FCI) = " + fmt("%.3e", worst));
  return o;
}

Outcome exhaustion_exactness() {
  Outcome o;
  for (const auto& name : testsupport::fixture_names()) {
    const auto t = testsupport::load_fixture(name);
    for (auto mode : {SquishMode::squish_nv, SquishMode::squish_v}) {
      const auto tr = run_mode(t, mode, 1e-300);
      const double err = std::max(std::abs(tr.records.back().e_nv - tr.e_fci[0]), std::abs(tr.records.back().e_v - tr.e_fci[0]));
      o.require(tr.termination == Termination::exhausted && err <= 1e-8,
                name + " " + to_string(mode) + " |E-E_FCI| = " + fmt("%.2e", err));
    }
  }
  return o;
}

Outcome rdm_oracle() {
  Outcome o;
  std::mt19937_64 rng(20240611);
  std::uniform_int_distribution<int> norb_dist(2, 4);
  double gamma_err = 0, eps_err = 0, sum_err = 0;
  int cases = 0;
  while (cases < 25) {
    const int m = norb_dist(rng);
    const int nelec = std::uniform_int_distribution<int>(1, 2 * m - 1)(rng);
    const int ms2 = (nelec % 2) ? (rng() % 2 ? 1 : -1) : 0;
    const auto table = testsupport::random_table(m, nelec, ms2, rng);
    const auto basis = enumerate_basis(m, nelec, ms2);
    const auto amps = testsupport::random_state(basis.size(), rng);
    const oracle::FockSpace fock(m);
    const auto v = fock.lift(amps, basis);
    const auto r = build_rdms(amps, basis);
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q) {
        gamma_err = std::max(gamma_err, std::abs(r.one(p, q) - oracle::FockSpace::expect(fock.one_body(p, q), v)));
        for (int s = 0; s < m; ++s)
          for (int u = 0; u < m; ++u)
            gamma_err = std::max(gamma_err, std::abs(r.two(p, q, s, u) -
                                                     oracle::FockSpace::expect(fock.two_body(p, q, s, u), v)));
      }
    double sum = table.core_energy();
    for (const auto& tc : term_contributions(r, table, TermSet::full(m))) {
      TermSet only(m);
      only.insert(tc.key);
      eps_err = std::max(eps_err, std::abs(tc.epsilon - oracle::FockSpace::expect(fock.hamiltonian(table, &only), v)));
      sum += tc.epsilon;
    }
    sum_err = std::max(sum_err, std::abs(sum - oracle::FockSpace::expect(fock.hamiltonian(table), v) - table.core_energy()));
    ++cases;
  }
  o.require(gamma_err <= 1e-12, "max gamma/Gamma error " + fmt("%.2e", gamma_err));
  o.require(eps_err <= 1e-12, "max epsilon error " + fmt("%.2e", eps_err));
  o.require(sum_err <= 1e-10, "max |sum eps + h_nuc - <H>| " + fmt("%.2e", sum_err));
  return o;
}

Outcome eigensolver_oracle() {
  Outcome o;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> logdim(std::log(50.0), std::log(2000.0));
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const auto n = static_cast<std::size_t>(std::exp(logdim(rng)));
    const std::size_t J = 1 + rng() % 4;
    const auto mat = testsupport::random_sparse(n, std::min(0.05, 20.0 / static_cast<double>(n)), rng);
    const auto dense = dense_eigenpairs(mat, J);
    const auto dav = davidson(mat, J, 1e-9);
    for (std::size_t j = 0; j < J; ++j) worst = std::max(worst, std::abs(dense[j].energy - dav[j].energy));
  }
  o.require(worst <= 1e-10, "50 instances, max eigenvalue gap " + fmt("%.2e", worst));
  return o;
}

Outcome norm_monotonicity() {
  Outcome o;
  std::size_t runs = 0;
  bool ok = true;
  for (const auto& name : testsupport::fixture_names()) {
    const auto t = testsupport::load_fixture(name);
    const double full = one_norm(t);
    for (auto mode : kIterative)
      for (double delta : {kChemicalAccuracy, 1e-300}) {
        const auto tr = run_mode(t, mode, delta);
        for (std::size_t k = 0; k < tr.records.size(); ++k) {
          if (tr.records[k].one_norm > full + 1e-12) ok = false;
          if (k && tr.records[k].one_norm < tr.records[k - 1].one_norm) ok = false;
        }
        ++runs;
      }
  }
  o.require(ok, std::to_string(runs) + " runs nondecreasing and bounded by the full norm");
  return o;
}

Outcome fcidump_roundtrip() {
  Outcome o;
  for (const auto& name : testsupport::fixture_names()) {
    const auto t = testsupport::load_fixture(name);
    std::stringstream ss;
    write_fcidump(t, ss);
    const auto back = parse_fcidump(ss);
    double err = std::abs(back.core_energy() - t.core_energy());
    for (std::size_t i = 0; i < t.one_body_data().size(); ++i)
      err = std::max(err, std::abs(back.one_body_data()[i] - t.one_body_data()[i]));
    for (std::size_t i = 0; i < t.two_body_data().size(); ++i)
      err = std::max(err, std::abs(back.two_body_data()[i] - t.two_body_data()[i]));
    o.require(err <= 1e-12 && back.header().norb == t.header().norb && back.header().nelec == t.header().nelec,
              name + " max error " + fmt("%.2e", err));
  }
  return o;
}

// ---- ASCI ----

Outcome asci() {
  Outcome o;
  const auto t = testsupport::load_fixture("lih_sto3g");
  const double e_fci = testsupport::fixture_sidecar("lih_sto3g")["fci_energy"].get<double>();
  const auto tr = run_asci(t, AsciConfig{});
  std::string sizes;
  bool variational = true;
  for (const auto& r : tr.records) {
    sizes += (sizes.empty() ? "" : "->") + std::to_string(r.space_size);
    if (r.e0 < e_fci - 1e-9) variational = false;
  }
  const double err = std::abs(tr.records.back().e0 - e_fci);
  o.require(tr.converged && err <= 1e-8, "sizes " + sizes + ", |E-E_FCI| = " + fmt("%.2e", err));
  const bool schedule = tr.records.size() >= 4 && tr.records[1].space_size == 10 && tr.records[2].space_size == 50 &&
                        tr.records[3].space_size == 225;
  o.require(schedule, "growth 10->50->225");
  o.require(variational, "every iterate variational");
  // At the exact eigenvector the perturbative estimate reproduces every amplitude.
  const auto ranking = asci_rank(tr.state, tr.basis, tr.state.energy, t);
  double fp = 0;
  for (const auto& c : ranking.candidates) {
    const auto i = tr.basis.find(c.det);
    fp = std::max(fp, i ? std::abs(c.coefficient - tr.state.amplitudes[*i]) : std::abs(c.coefficient));
  }
  o.require(fp <= 1e-8, "fixed-point deviation " + fmt("%.2e", fp));
  return o;
}

// ---- shadows ----

Outcome shadows_budget() {
  Outcome o;
  auto ulps = [](double a, double b) {
    return a == b || std::nextafter(a, b) == b;
  };
  const double a = measurement_budget({2, 12, 0.01}), b = measurement_budget({4, 12, 0.1});
  o.require(ulps(a, 130000.0 / 11.0), "eta=2 N=12 eps=0.01 -> " + fmt("%.10f", a));
  o.require(ulps(b, 780000.0 / 1584.0), "eta=4 N=12 eps=0.1 -> " + fmt("%.10f", b));
  bool scaling = true;
  for (int eta = 2; eta <= 12; ++eta)
    for (int n = eta; n <= 64; n += 3)
      for (double eps : {0.2, 0.05, 0.01, 0.003})
        if (measurement_budget({eta, n, eps / 2}) != 4.0 * measurement_budget({eta, n, eps})) scaling = false;
  o.require(scaling, "exact x4 under eps -> eps/2");
  return o;
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria{
    {"truncation_lih", truncation_lih},
    {"truncation_h2", truncation_h2},
    {"truncation_h3p", truncation_h3p},
    {"counting_identities", counting_identities},
    {"ranking_superiority", ranking_superiority},
    {"benchmark_fidelity", benchmark_fidelity},
    {"variational_bound", variational_bound},
    {"exhaustion_exactness", exhaustion_exactness},
    {"rdm_oracle", rdm_oracle},
    {"eigensolver_oracle", eigensolver_oracle},
    {"norm_monotonicity", norm_monotonicity},
    {"fcidump_roundtrip", fcidump_roundtrip},
    {"asci", asci},
    {"shadows_budget", shadows_budget},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted(argv + 1, argv + argc);
  for (const auto& w : wanted)
    if (std::none_of(kCriteria.begin(), kCriteria.end(), [&](const auto& c) { return c.first == w; })) {
      std::cerr << "unknown criterion '" << w << "'\n";
      return 64;
    }
  int failures = 0;
  for (const auto& [name, fn] : kCriteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), name) == wanted.end()) continue;
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    if (!o.pass) ++failures;
  }
  return failures ? 1 : 0;
}
