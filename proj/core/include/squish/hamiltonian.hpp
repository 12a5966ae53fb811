#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "squish/fcidump.hpp"

namespace squish {

enum class TermKind : std::uint8_t { one_body = 0, two_body = 1 };

/// A single Hamiltonian term, identified by its spatial index tuple.
/// One-body keys use idx[0..1]; idx[2..3] are zero.
struct TermKey {
  TermKind kind = TermKind::one_body;
  std::array<int, 4> idx{};

  static TermKey one(int p, int q) { return {TermKind::one_body, {p, q, 0, 0}}; }
  static TermKey two(int p, int q, int r, int s) { return {TermKind::two_body, {p, q, r, s}}; }

  auto operator<=>(const TermKey&) const = default;
  std::string to_string() const;
};

// Hermitian conjugate: (p,q) -> (q,p), (p,q,r,s) -> (s,r,q,p).
TermKey hermitian_conjugate(const TermKey& key);

/// How tuples are grouped into one selectable term.
///  conjugate:     {key, hc(key)}, the minimal grouping that keeps H_T hermitian.
///  permutational: the full 8-fold real-orbital permutation class.
enum class TermGrouping { conjugate, permutational };

std::vector<TermKey> class_members(const TermKey& key, TermGrouping grouping = TermGrouping::conjugate);
// Lexicographic minimum of class_members(key).
TermKey canonical_key(const TermKey& key, TermGrouping grouping = TermGrouping::conjugate);

// Starting term set: everything except all-virtual two-body tuples, or only the
// terms with nonzero expectation in the Hartree-Fock determinant.
enum class InitialSet { no_vvvv, hf_minimal };

/// The included index set of a truncated Hamiltonian, as a tuple mask that is
/// closed under the class grouping. The complement is the excluded set.
class TermSet {
 public:
  explicit TermSet(int norb = 0, TermGrouping grouping = TermGrouping::conjugate);
  static TermSet full(int norb, TermGrouping grouping = TermGrouping::conjugate);

  int norb() const { return norb_; }
  TermGrouping grouping() const { return grouping_; }

  bool contains(const TermKey& key) const;
  bool contains_one(int p, int q) const { return one_[idx2(p, q)] != 0; }
  bool contains_two(int p, int q, int r, int s) const { return two_[idx4(p, q, r, s)] != 0; }

  // Adds the whole class of `key`. Returns the number of newly included tuples.
  std::size_t insert(const TermKey& key);

  std::vector<TermKey> included_classes() const;
  std::vector<TermKey> excluded_classes() const;
  std::size_t universe() const;

  std::size_t included_tuples(TermKind kind) const;
  std::size_t total_tuples(TermKind kind) const;
  std::size_t excluded_tuples(TermKind kind) const { return total_tuples(kind) - included_tuples(kind); }
  bool excludes_nothing() const;

  TermSet complement() const;

  std::span<const std::uint8_t> one_body_mask() const { return one_; }
  std::span<const std::uint8_t> two_body_mask() const { return two_; }

  bool operator==(const TermSet& other) const = default;

 private:
  friend TermSet initial_term_set(const OrbitalPartition&, InitialSet, TermGrouping);

  template <typename Fn>
  void for_each_canonical(Fn&& fn) const;

  std::size_t idx2(int p, int q) const { return static_cast<std::size_t>(p) * norb_ + q; }
  std::size_t idx4(int p, int q, int r, int s) const {
    return ((static_cast<std::size_t>(p) * norb_ + q) * norb_ + r) * norb_ + s;
  }

  int norb_ = 0;
  TermGrouping grouping_ = TermGrouping::conjugate;
  std::vector<std::uint8_t> one_;
  std::vector<std::uint8_t> two_;
};

InitialSet parse_initial_set(const std::string& name);
std::string to_string(InitialSet set);

TermSet initial_term_set(const OrbitalPartition& partition, InitialSet mode,
                         TermGrouping grouping = TermGrouping::conjugate);

// Zeroes every coefficient whose tuple is not in `terms`; core energy and header are kept.
IntegralTable truncated_table(const IntegralTable& full, const TermSet& terms);

// Spin-orbital 1-norm: 2 sum|h_pq| + 2 sum|h_pqrs| (the core energy is excluded).
double one_norm(const IntegralTable& table);

/// Per-tuple term counts, matching the layout of the term-count tables.
struct CountReport {
  std::size_t one_body_total = 0;
  std::size_t two_body_total = 0;
  std::size_t included_one_body = 0;
  std::size_t included_two_body = 0;
  std::size_t excluded_two_body = 0;
  std::size_t vvvv_total = 0;
  std::size_t vvvv_included = 0;
};

CountReport count_report(const TermSet& terms, const OrbitalPartition& partition);

// Number of included two-body tuples with all four indices virtual.
std::size_t vvvv_included(const TermSet& terms, const OrbitalPartition& partition);

// Tuple count of the class of `key` that is two-body and all-virtual.
std::size_t vvvv_tuples_in_class(const TermKey& key, const OrbitalPartition& partition,
                                 TermGrouping grouping = TermGrouping::conjugate);

// Audit format: one canonical key per line, "1b p q" or "2b p q r s".
void write_term_set(const TermSet& terms, std::ostream& out);
TermSet read_term_set(std::istream& in, int norb, TermGrouping grouping = TermGrouping::conjugate);

}  // namespace squish
