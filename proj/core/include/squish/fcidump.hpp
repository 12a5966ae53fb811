#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace squish {

struct FcidumpHeader {
  int norb = 0;
  int nelec = 0;
  int ms2 = 0;
  std::vector<int> orbsym;
  int isym = 1;

  // Throws DomainError when the quantum numbers are inconsistent.
  void validate() const;
};

/// One- and two-electron integrals over spatial orbitals.
///
/// Two-electron integrals are stored densely in physicist order, h(p,q,r,s) =
/// (pr|qs), so that the Hamiltonian reads
///   H = sum_{pq,s} h(p,q) a+_{ps} a_{qs}
///     + 1/2 sum_{pqrs,st} h(p,q,r,s) a+_{ps} a+_{qt} a_{st} a_{rs} + h_nuc.
/// Invariants (for any table produced by this library): h(p,q) = h(q,p),
/// h(p,q,r,s) = h(s,r,q,p), h(p,q,r,s) = h(q,p,s,r).
class IntegralTable {
 public:
  IntegralTable() = default;
  explicit IntegralTable(FcidumpHeader header);

  int norb() const { return header_.norb; }
  const FcidumpHeader& header() const { return header_; }

  double one_body(int p, int q) const { return one_body_[idx2(p, q)]; }
  double two_body(int p, int q, int r, int s) const { return two_body_[idx4(p, q, r, s)]; }
  double core_energy() const { return core_energy_; }

  void set_one_body(int p, int q, double v) { one_body_[idx2(p, q)] = v; }
  void set_two_body(int p, int q, int r, int s, double v) { two_body_[idx4(p, q, r, s)] = v; }
  void set_core_energy(double v) { core_energy_ = v; }

  const std::vector<double>& one_body_data() const { return one_body_; }
  const std::vector<double>& two_body_data() const { return two_body_; }
  std::vector<double>& one_body_data() { return one_body_; }
  std::vector<double>& two_body_data() { return two_body_; }

  std::size_t idx2(int p, int q) const {
    return static_cast<std::size_t>(p) * m_ + static_cast<std::size_t>(q);
  }
  std::size_t idx4(int p, int q, int r, int s) const {
    return ((static_cast<std::size_t>(p) * m_ + q) * m_ + r) * m_ + s;
  }

  // Largest violation of the hermiticity and exchange symmetries above.
  double symmetry_violation() const;
  // True when the chemist-notation 8-fold symmetry holds to `tol`.
  bool has_permutational_symmetry(double tol = 1e-12) const;

 private:
  FcidumpHeader header_;
  std::size_t m_ = 0;
  std::vector<double> one_body_;
  std::vector<double> two_body_;
  double core_energy_ = 0.0;
};

struct OrbitalPartition {
  std::vector<int> occupied;
  std::vector<int> virtual_orbitals;

  int norb() const { return static_cast<int>(occupied.size() + virtual_orbitals.size()); }
  bool is_virtual(int p) const;
};

// Parses an FCIDUMP namelist header followed by "value i j k l" records.
IntegralTable parse_fcidump(std::istream& in);
IntegralTable read_fcidump(const std::filesystem::path& path);

// Emits the symmetry-unique nonzero integrals; the core energy line is always written.
void write_fcidump(const IntegralTable& table, std::ostream& out);
void write_fcidump(const IntegralTable& table, const std::filesystem::path& path);

// Aufbau split for closed-shell references: the first nelec/2 orbitals are occupied.
OrbitalPartition classify_orbitals(const FcidumpHeader& header);

}  // namespace squish
