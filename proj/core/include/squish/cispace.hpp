#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "squish/fcidump.hpp"
#include "squish/hamiltonian.hpp"

namespace squish {

/// Slater determinant as alpha/beta occupation masks (bit p = spatial orbital p).
/// Phase convention: spin orbitals are ordered alpha block then beta block, and
/// |D> = prod a+ in ascending spin-orbital order applied to the vacuum.
struct Determinant {
  std::uint64_t alpha = 0;
  std::uint64_t beta = 0;

  auto operator<=>(const Determinant&) const = default;
};

struct DeterminantHash {
  std::size_t operator()(const Determinant& d) const noexcept {
    std::uint64_t h = d.alpha * 0x9E3779B97F4A7C15ull;
    h ^= d.beta + 0x632BE59BD9B4E019ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

// Number of differing spin orbitals / 2; 0 for identical determinants.
int excitation_rank(const Determinant& a, const Determinant& b);

/// Fixed (norb, n_alpha, n_beta) particle sector.
struct Sector {
  int norb = 0;
  int n_alpha = 0;
  int n_beta = 0;

  static Sector from_header(const FcidumpHeader& header);
  int nelec() const { return n_alpha + n_beta; }
  int ms2() const { return n_alpha - n_beta; }
  bool contains(const Determinant& d) const;
  bool operator==(const Sector&) const = default;
};

// Aufbau determinant: lowest n_alpha / n_beta orbitals occupied.
Determinant hf_determinant(const Sector& sector);

/// Ordered determinant basis; ordering is lexicographic on (alpha, beta).
class CiBasis {
 public:
  CiBasis() = default;
  // Sorts and removes duplicates. Every determinant must belong to `sector`.
  CiBasis(Sector sector, std::vector<Determinant> dets);

  const Sector& sector() const { return sector_; }
  std::size_t size() const { return dets_.size(); }
  bool empty() const { return dets_.empty(); }
  const Determinant& operator[](std::size_t i) const { return dets_[i]; }
  std::span<const Determinant> dets() const { return dets_; }
  std::optional<std::size_t> find(const Determinant& d) const;

 private:
  Sector sector_;
  std::vector<Determinant> dets_;
  std::unordered_map<Determinant, std::size_t, DeterminantHash> index_;
};

constexpr std::size_t kDefaultBasisCap = 2'000'000;

CiBasis enumerate_basis(int norb, int nelec, int ms2, std::size_t cap = kDefaultBasisCap);
CiBasis enumerate_basis(const Sector& sector, std::size_t cap = kDefaultBasisCap);

// Calls fn(det') for every determinant of the same sector within excitation rank 1 or 2.
void for_each_connection(const Determinant& det, int norb, const std::function<void(const Determinant&)>& fn);

/// Real symmetric matrix: dense diagonal plus the strictly lower triangle in CSR form.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;
  SparseSymMatrix(std::vector<double> diagonal, std::vector<std::size_t> row_ptr,
                  std::vector<std::size_t> cols, std::vector<double> values);

  // Builds from a dense row-major symmetric matrix, dropping exact zeros off the diagonal.
  static SparseSymMatrix from_dense(std::span<const double> dense, std::size_t dim);

  std::size_t dimension() const { return diagonal_.size(); }
  std::size_t off_diagonal_nonzeros() const { return values_.size(); }
  std::span<const double> diagonal() const { return diagonal_; }

  // y = A x
  void multiply(std::span<const double> x, std::span<double> y) const;
  double element(std::size_t i, std::size_t j) const;
  // Row-major dense copy.
  std::vector<double> to_dense() const;

 private:
  std::vector<double> diagonal_;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
};

/// Slater-Condon evaluation of <d1|H_T|d2> for a term-masked Hamiltonian.
/// The core energy is never included.
class SlaterCondon {
 public:
  SlaterCondon(const IntegralTable& table, const TermSet* terms = nullptr);

  double element(const Determinant& bra, const Determinant& ket) const;
  double diagonal(const Determinant& d) const;

 private:
  double h1(int p, int q) const;
  // Masked two-body coefficient symmetrized over particle exchange.
  double h2(int p, int q, int r, int s) const;
  // Spin-orbital two-body coefficient, spin orbitals in [0, 2M).
  double v(int P, int Q, int R, int S) const;

  const IntegralTable& table_;
  const TermSet* terms_;
  int m_;
};

// <d1|H_T|d2>; throws DomainError if the determinants are in different sectors.
double matrix_element(const Determinant& d1, const Determinant& d2, const IntegralTable& table,
                      const TermSet& terms);

constexpr std::size_t kDefaultNonzeroBudget = 200'000'000;

SparseSymMatrix build_matrix(const CiBasis& basis, const IntegralTable& table, const TermSet& terms,
                             std::size_t nonzero_budget = kDefaultNonzeroBudget);
SparseSymMatrix build_matrix(const CiBasis& basis, const IntegralTable& table);

// Closed-shell restricted Hartree-Fock total energy (core energy included).
double hf_energy(const IntegralTable& table, const OrbitalPartition& partition);

}  // namespace squish
