#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "squish/cispace.hpp"

namespace squish {

/// Normalized eigenvector over a CiBasis with its electronic eigenvalue.
/// Sign convention: the largest-magnitude amplitude is positive.
struct CiState {
  std::vector<double> amplitudes;
  double energy = 0.0;
  double residual_norm = 0.0;
  // Set when another eigenvalue lies within the degeneracy tolerance.
  bool degenerate = false;
};

struct EigenOptions {
  std::size_t dense_threshold = 1500;
  int max_iterations = 1000;
  std::size_t max_subspace = 0;  // 0 picks max(8J, 40)
  double degeneracy_tol = 1e-9;
  // Starting vectors for Davidson; orthonormalized internally.
  std::vector<std::vector<double>> guesses;
  // Tie-break reference: inside a degenerate ground level the returned state
  // is the projection of this vector onto the eigenspace.
  const std::vector<double>* previous = nullptr;
};

// Lowest J eigenpairs, energies ascending. Dense below the threshold, Davidson above.
std::vector<CiState> lowest_eigenpairs(const SparseSymMatrix& mat, std::size_t J, double tol,
                                       const EigenOptions& options = {});
std::vector<CiState> dense_eigenpairs(const SparseSymMatrix& mat, std::size_t J, const EigenOptions& options = {});
std::vector<CiState> davidson(const SparseSymMatrix& mat, std::size_t J, double tol, const EigenOptions& options = {});

// ||A x - lambda x||
double residual_norm(const SparseSymMatrix& mat, const std::vector<double>& x, double lambda);

// |<a|b>| with determinants aligned by identity.
double overlap(const CiState& a, const CiBasis& basis_a, const CiState& b, const CiBasis& basis_b);

/// A state together with the determinants it is expanded over.
struct StateVector {
  CiBasis basis;
  CiState state;
};

// Text lines "alpha_hex beta_hex amplitude". Loading normalizes, warning on stderr
// when the norm is off by more than 1e-6.
void write_state(const CiState& state, const CiBasis& basis, std::ostream& out);
void write_state(const CiState& state, const CiBasis& basis, const std::string& path);
StateVector read_state(std::istream& in, const Sector& sector);
StateVector read_state(const std::string& path, const Sector& sector);

// Re-expands a state over another basis of the same sector; missing determinants get 0.
std::vector<double> embed(const CiState& state, const CiBasis& from, const CiBasis& to);

}  // namespace squish
