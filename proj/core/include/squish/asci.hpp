#pragma once

#include <cstddef>
#include <vector>

#include "squish/cispace.hpp"
#include "squish/eigensolver.hpp"
#include "squish/fcidump.hpp"

namespace squish {

struct AsciCandidate {
  Determinant det;
  double coefficient = 0.0;
};

struct AsciRanking {
  // Ordered by |coefficient| descending, ties by ascending determinant.
  std::vector<AsciCandidate> candidates;
  // Pool members dropped because |H_ii - E0| < 1e-12.
  std::size_t singular_pivots = 0;
};

// Perturbative estimate C_i = -(sum_{j in S, j != i} H_ij C_j) / (H_ii - E0) over the
// support S of `state` and every determinant connected to it. E0 is electronic.
AsciRanking asci_rank(const CiState& state, const CiBasis& support, double e0, const IntegralTable& table);

struct AsciConfig {
  // Target space size per iteration; the last entry repeats.
  std::vector<std::size_t> target_sizes{10, 50, 225};
  double delta = 1e-10;
  std::size_t max_iterations = 50;
  double solver_tol = 1e-10;
};

struct AsciRecord {
  std::size_t k = 0;
  std::size_t space_size = 0;
  double e0 = 0.0;        // total energy
  double err_self = 0.0;  // NaN at k = 0
};

struct AsciTrace {
  std::vector<AsciRecord> records;
  bool converged = false;
  CiBasis basis;
  CiState state;
};

// Starts from the Hartree-Fock determinant (k = 0) and grows the target space.
AsciTrace run_asci(const IntegralTable& table, const AsciConfig& config);

}  // namespace squish
