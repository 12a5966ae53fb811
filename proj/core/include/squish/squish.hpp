#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "squish/cispace.hpp"
#include "squish/eigensolver.hpp"
#include "squish/error.hpp"
#include "squish/fcidump.hpp"
#include "squish/hamiltonian.hpp"

namespace squish {

enum class SquishMode { squish_nv, squish_v, benchmark1, benchmark2, coeff_baseline, one_shot, multi_ref };
enum class ConvergenceRef { self, exact };
// nv: truncated-Hamiltonian expectation; v: full-Hamiltonian expectation.
enum class EnergyKind { nv, v };
enum class RankScheme { energetic, coefficient };

SquishMode parse_mode(const std::string& name);
std::string to_string(SquishMode mode);
ConvergenceRef parse_convergence(const std::string& name);
std::string to_string(ConvergenceRef ref);
std::string to_string(EnergyKind kind);
RankScheme parse_scheme(const std::string& name);
std::string to_string(RankScheme scheme);

constexpr double kChemicalAccuracy = 1.6e-3;

// m_k = floor(m0 * growth^floor(k / grow_every)) classes added after iteration k.
struct MSchedule {
  std::size_t m0 = 2;
  double growth = 10.0;
  std::size_t grow_every = 3;

  std::size_t at(std::size_t k) const;
};

struct SquishConfig {
  SquishMode mode = SquishMode::squish_v;
  InitialSet initial_set = InitialSet::no_vvvv;
  TermGrouping grouping = TermGrouping::conjugate;
  MSchedule schedule;
  double delta = 1e-6;
  ConvergenceRef convergence = ConvergenceRef::self;
  std::size_t states = 1;
  // Upper bound on recorded iterations.
  std::size_t max_iterations = 200;
  double solver_tol = 1e-9;
  // Overrides the mode's default energy.
  std::optional<EnergyKind> energy;
  // Compute the exact FCI reference even when nothing requires it (errors, overlaps).
  bool reference = true;
  // Writes terms_kNNNN.txt per iteration when set.
  std::optional<std::string> audit_dir;

  void validate() const;
  EnergyKind energy_kind() const;
  RankScheme scheme() const;
  bool ranks_with_exact_state() const;
};

struct IterationRecord {
  std::size_t k = 0;
  std::size_t included_tuples = 0;  // two-body tuples in the included set
  std::size_t vvvv_tuples = 0;
  double e_nv = 0.0;  // total energies of the ground state of H_T
  double e_v = 0.0;
  double e_corr = 0.0;     // driving energy minus the HF energy
  double err_exact = 0.0;  // NaN without a reference
  double err_self = 0.0;   // NaN at k = 0
  double overlap = 0.0;    // NaN without a reference
  double wall_ms = 0.0;
  double one_norm = 0.0;
  // Driving energy per target state (one entry unless multi-reference).
  std::vector<double> state_energies;
};

enum class Termination { converged, exhausted, max_iterations };
std::string to_string(Termination t);

struct SquishTrace {
  std::vector<IterationRecord> records;
  Termination termination = Termination::converged;
  double e_hf = 0.0;
  std::vector<double> e_fci;  // lowest FCI total energies, empty without a reference
  TermSet final_terms;
  std::size_t basis_size = 0;
  std::size_t pool_classes_initial = 0;
};

class TimeoutError : public Error {
 public:
  TimeoutError(const std::string& what, SquishTrace partial) : Error(what), trace_(std::move(partial)) {}
  const SquishTrace& trace() const { return trace_; }

 private:
  SquishTrace trace_;
};

// Iterative truncation with a single target state (J = 1 unless mode is multi_ref).
SquishTrace run_squish(const IntegralTable& table, const SquishConfig& config);
// Multi-reference variant; config.states = J >= 1.
SquishTrace run_multi_ref(const IntegralTable& table, const SquishConfig& config);

struct OneShotConfig {
  RankScheme scheme = RankScheme::energetic;
  // Class counts m at which to evaluate; empty means every m from 0 to the pool size.
  std::vector<std::size_t> budgets;
  InitialSet initial_set = InitialSet::no_vvvv;
  TermGrouping grouping = TermGrouping::conjugate;
  // Without an external state, the approximate state is the ground state of this truncation.
  InitialSet degraded_set = InitialSet::no_vvvv;
  double solver_tol = 1e-9;
};

struct OneShotPoint {
  std::size_t m = 0;
  std::size_t included_tuples = 0;
  std::size_t vvvv_tuples = 0;
  double e_eval = 0.0;  // <Psi_0|H_T|Psi_0>, total
  double error = 0.0;   // |e_eval - E_FCI|
};

struct OneShotResult {
  std::vector<OneShotPoint> points;
  std::vector<TermKey> order;  // ranked pool
  double approx_energy = 0.0;  // <Psi_A|H|Psi_A>, total
  double e_fci = 0.0;
  // Smallest m reaching chemical accuracy; nullopt when none of the budgets does.
  std::optional<std::size_t> classes_to_accuracy;
};

OneShotResult run_one_shot(const IntegralTable& table, const OneShotConfig& config,
                           const StateVector* approx_state = nullptr);

}  // namespace squish
