#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "squish/cispace.hpp"
#include "squish/eigensolver.hpp"
#include "squish/fcidump.hpp"
#include "squish/hamiltonian.hpp"

namespace squish {

/// Spin-summed reduced density matrices of a real state.
///   gamma(p,q)      = sum_s   <a+_{ps} a_{qs}>
///   Gamma(p,q,r,s)  = sum_st  <a+_{ps} a+_{qt} a_{st} a_{rs}>
/// With this index order the energy is sum h_pq gamma_pq + 1/2 sum h_pqrs Gamma_pqrs + h_nuc,
/// and sum_pq Gamma(p,q,p,q) = eta (eta - 1).
struct RdmPair {
  int norb = 0;
  std::vector<double> gamma;
  std::vector<double> Gamma;

  double one(int p, int q) const { return gamma[static_cast<std::size_t>(p) * norb + q]; }
  double two(int p, int q, int r, int s) const {
    return Gamma[((static_cast<std::size_t>(p) * norb + q) * norb + r) * norb + s];
  }
  double trace() const;
  double pair_count() const;
};

RdmPair build_rdms(std::span<const double> amplitudes, const CiBasis& basis);
inline RdmPair build_rdms(const CiState& state, const CiBasis& basis) { return build_rdms(state.amplitudes, basis); }

// Full Hamiltonian expectation, core energy included.
double energy_from_rdms(const RdmPair& rdms, const IntegralTable& table);
// Expectation of the truncated Hamiltonian restricted to `terms`, core energy included.
double energy_from_rdms(const RdmPair& rdms, const IntegralTable& table, const TermSet& terms);

struct TermContribution {
  TermKey key;  // canonical class key
  double epsilon = 0.0;
};

// Energetic contribution of every class included in `pool`. The 1/2 of the
// two-body operator is folded in, so contributions over all classes sum to the
// electronic energy.
std::vector<TermContribution> term_contributions(const RdmPair& rdms, const IntegralTable& table, const TermSet& pool);

// <S^2> diagnostic.
double spin_squared(std::span<const double> amplitudes, const CiBasis& basis);

// Text dump: header "norb M", then gamma rows, then Gamma rows (row-major).
void write_rdms(const RdmPair& rdms, std::ostream& out);

}  // namespace squish
