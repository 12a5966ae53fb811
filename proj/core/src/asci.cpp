#include "squish/asci.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <unordered_map>

#include "squish/error.hpp"

namespace squish {

AsciRanking asci_rank(const CiState& state, const CiBasis& support, double e0, const IntegralTable& table) {
  if (state.amplitudes.size() != support.size()) throw DomainError("state and support sizes differ");
  const SlaterCondon sc(table);
  const int norb = support.sector().norb;

  // Numerators accumulate over the support; each support determinant is also in the pool.
  std::unordered_map<Determinant, double, DeterminantHash> numer;
  for (std::size_t j = 0; j < support.size(); ++j) numer.emplace(support[j], 0.0);
  for (std::size_t j = 0; j < support.size(); ++j) {
    const double cj = state.amplitudes[j];
    for_each_connection(support[j], norb, [&](const Determinant& di) { numer[di] += sc.element(di, support[j]) * cj; });
  }

  std::vector<std::pair<Determinant, double>> pool(numer.begin(), numer.end());
  std::vector<double> coeff(pool.size());
  std::vector<char> keep(pool.size(), 1);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::ptrdiff_t x = 0; x < static_cast<std::ptrdiff_t>(pool.size()); ++x) {
    const auto i = static_cast<std::size_t>(x);
    const double denom = sc.diagonal(pool[i].first) - e0;
    if (std::abs(denom) < 1e-12) {
      keep[i] = 0;
      continue;
    }
    coeff[i] = -pool[i].second / denom;
  }

  AsciRanking out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (keep[i]) out.candidates.push_back({pool[i].first, coeff[i]});
    else ++out.singular_pivots;
  }
  if (out.singular_pivots)
    std::cerr << "warning: skipped " << out.singular_pivots << " singular pivot(s) in the perturbative ranking\n";
  std::sort(out.candidates.begin(), out.candidates.end(), [](const AsciCandidate& a, const AsciCandidate& b) {
    const double x = std::abs(a.coefficient), y = std::abs(b.coefficient);
    if (x != y) return x > y;
    return a.det < b.det;
  });
  return out;
}

AsciTrace run_asci(const IntegralTable& table, const AsciConfig& config) {
  if (config.target_sizes.empty()) throw DomainError("ASCI needs at least one target size");
  for (auto t : config.target_sizes)
    if (t < 1) throw DomainError("ASCI target size must be at least 1");
  const Sector sector = Sector::from_header(table.header());
  const double core = table.core_energy();

  AsciTrace trace;
  trace.basis = CiBasis(sector, {hf_determinant(sector)});
  trace.state.amplitudes = {1.0};
  trace.state.energy = SlaterCondon(table).diagonal(hf_determinant(sector));
  trace.records.push_back({0, 1, trace.state.energy + core, std::numeric_limits<double>::quiet_NaN()});

  for (std::size_t k = 1; k <= config.max_iterations; ++k) {
    const std::size_t target = config.target_sizes[std::min(k - 1, config.target_sizes.size() - 1)];
    const auto ranking = asci_rank(trace.state, trace.basis, trace.state.energy, table);

    // The previous support is always kept, so the spaces are nested.
    std::vector<Determinant> dets(trace.basis.dets().begin(), trace.basis.dets().end());
    for (const auto& c : ranking.candidates) {
      if (dets.size() >= target) break;
      if (!trace.basis.find(c.det)) dets.push_back(c.det);
    }
    CiBasis next(sector, std::move(dets));
    EigenOptions opts;
    const auto guess = embed(trace.state, trace.basis, next);
    opts.guesses = {guess};
    opts.previous = &guess;
    CiState state = lowest_eigenpairs(build_matrix(next, table), 1, config.solver_tol, opts).front();

    const double change = std::abs(state.energy - trace.state.energy);
    trace.records.push_back({k, next.size(), state.energy + core, change});
    trace.basis = std::move(next);
    trace.state = std::move(state);
    if (change < config.delta) {
      trace.converged = true;
      break;
    }
  }
  return trace;
}

}  // namespace squish
