#include "squish/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "squish/error.hpp"

namespace squish {

namespace {

std::array<int, 4> hc4(const std::array<int, 4>& t) { return {t[3], t[2], t[1], t[0]}; }

std::vector<bool> virtual_mask(const OrbitalPartition& part) {
  std::vector<bool> v(static_cast<std::size_t>(part.norb()), false);
  for (int p : part.virtual_orbitals) v[static_cast<std::size_t>(p)] = true;
  return v;
}

}  // namespace

std::string TermKey::to_string() const {
  std::ostringstream os;
  if (kind == TermKind::one_body)
    os << "1b " << idx[0] << ' ' << idx[1];
  else
    os << "2b " << idx[0] << ' ' << idx[1] << ' ' << idx[2] << ' ' << idx[3];
  return os.str();
}

TermKey hermitian_conjugate(const TermKey& key) {
  if (key.kind == TermKind::one_body) return TermKey::one(key.idx[1], key.idx[0]);
  return {TermKind::two_body, hc4(key.idx)};
}

std::vector<TermKey> class_members(const TermKey& key, TermGrouping grouping) {
  std::vector<TermKey> out{key};
  if (key.kind == TermKind::one_body || grouping == TermGrouping::conjugate) {
    TermKey h = hermitian_conjugate(key);
    if (h != key) out.push_back(h);
    std::sort(out.begin(), out.end());
    return out;
  }
  // Closure under hc, particle exchange and the two real-orbital swaps.
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto t = out[i].idx;
    const std::array<std::array<int, 4>, 4> images{{hc4(t),
                                                    {t[1], t[0], t[3], t[2]},
                                                    {t[2], t[1], t[0], t[3]},
                                                    {t[0], t[3], t[2], t[1]}}};
    for (const auto& im : images) {
      TermKey k{TermKind::two_body, im};
      if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

TermKey canonical_key(const TermKey& key, TermGrouping grouping) {
  if (key.kind == TermKind::one_body || grouping == TermGrouping::conjugate)
    return std::min(key, hermitian_conjugate(key));
  return class_members(key, grouping).front();
}

TermSet::TermSet(int norb, TermGrouping grouping)
    : norb_(norb),
      grouping_(grouping),
      one_(static_cast<std::size_t>(norb) * norb, 0),
      two_(static_cast<std::size_t>(norb) * norb * norb * norb, 0) {}

TermSet TermSet::full(int norb, TermGrouping grouping) {
  TermSet t(norb, grouping);
  std::fill(t.one_.begin(), t.one_.end(), 1);
  std::fill(t.two_.begin(), t.two_.end(), 1);
  return t;
}

bool TermSet::contains(const TermKey& key) const {
  const auto& i = key.idx;
  return key.kind == TermKind::one_body ? contains_one(i[0], i[1]) : contains_two(i[0], i[1], i[2], i[3]);
}

std::size_t TermSet::insert(const TermKey& key) {
  for (int x : key.idx)
    if (x < 0 || x >= norb_) throw IndexError("term index out of range: " + key.to_string());
  std::size_t added = 0;
  for (const auto& m : class_members(key, grouping_)) {
    const auto& i = m.idx;
    auto& slot = m.kind == TermKind::one_body ? one_[idx2(i[0], i[1])] : two_[idx4(i[0], i[1], i[2], i[3])];
    if (!slot) {
      slot = 1;
      ++added;
    }
  }
  return added;
}

template <typename Fn>
void TermSet::for_each_canonical(Fn&& fn) const {
  const int m = norb_;
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) {
      TermKey k = TermKey::one(p, q);
      if (canonical_key(k, grouping_) == k) fn(k);
    }
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s) {
          TermKey k = TermKey::two(p, q, r, s);
          if (grouping_ == TermGrouping::conjugate) {
            if (k.idx <= hc4(k.idx)) fn(k);
          } else if (canonical_key(k, grouping_) == k) {
            fn(k);
          }
        }
}

std::vector<TermKey> TermSet::included_classes() const {
  std::vector<TermKey> out;
  for_each_canonical([&](const TermKey& k) {
    if (contains(k)) out.push_back(k);
  });
  return out;
}

std::vector<TermKey> TermSet::excluded_classes() const {
  std::vector<TermKey> out;
  for_each_canonical([&](const TermKey& k) {
    if (!contains(k)) out.push_back(k);
  });
  return out;
}

std::size_t TermSet::universe() const {
  std::size_t n = 0;
  for_each_canonical([&](const TermKey&) { ++n; });
  return n;
}

std::size_t TermSet::included_tuples(TermKind kind) const {
  const auto& mask = kind == TermKind::one_body ? one_ : two_;
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

std::size_t TermSet::total_tuples(TermKind kind) const {
  return kind == TermKind::one_body ? one_.size() : two_.size();
}

bool TermSet::excludes_nothing() const {
  return std::all_of(one_.begin(), one_.end(), [](auto v) { return v != 0; }) &&
         std::all_of(two_.begin(), two_.end(), [](auto v) { return v != 0; });
}

TermSet TermSet::complement() const {
  TermSet out(*this);
  for (auto& v : out.one_) v = v ? 0 : 1;
  for (auto& v : out.two_) v = v ? 0 : 1;
  return out;
}

InitialSet parse_initial_set(const std::string& name) {
  if (name == "no_vvvv") return InitialSet::no_vvvv;
  if (name == "hf_minimal") return InitialSet::hf_minimal;
  throw DomainError("unknown initial set '" + name + "'");
}

std::string to_string(InitialSet set) { return set == InitialSet::no_vvvv ? "no_vvvv" : "hf_minimal"; }

TermSet initial_term_set(const OrbitalPartition& partition, InitialSet mode, TermGrouping grouping) {
  const int m = partition.norb();
  TermSet terms(m, grouping);
  if (mode == InitialSet::no_vvvv) {
    // The predicate is invariant under every index permutation, so the mask is class-closed.
    const auto virt = virtual_mask(partition);
    std::fill(terms.one_.begin(), terms.one_.end(), 1);
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q)
        for (int r = 0; r < m; ++r)
          for (int s = 0; s < m; ++s)
            terms.two_[terms.idx4(p, q, r, s)] = (virt[p] && virt[q] && virt[r] && virt[s]) ? 0 : 1;
    return terms;
  }
  for (int p = 0; p < m; ++p) terms.insert(TermKey::one(p, p));
  for (int i : partition.occupied)
    for (int j : partition.occupied) {
      terms.insert(TermKey::two(i, j, i, j));
      terms.insert(TermKey::two(i, j, j, i));
    }
  return terms;
}

IntegralTable truncated_table(const IntegralTable& full, const TermSet& terms) {
  if (terms.norb() != full.norb()) throw DomainError("term set and integral table disagree on orbital count");
  IntegralTable out(full);
  auto mask1 = terms.one_body_mask();
  auto mask2 = terms.two_body_mask();
  auto& h1 = out.one_body_data();
  auto& h2 = out.two_body_data();
  for (std::size_t i = 0; i < h1.size(); ++i)
    if (!mask1[i]) h1[i] = 0.0;
  for (std::size_t i = 0; i < h2.size(); ++i)
    if (!mask2[i]) h2[i] = 0.0;
  return out;
}

double one_norm(const IntegralTable& table) {
  double one = 0.0;
  for (double v : table.one_body_data()) one += std::abs(v);
  double two = 0.0;
  for (double v : table.two_body_data()) two += std::abs(v);
  // sum over sigma doubles the one-body sum; 1/2 * (4 spin combinations) doubles the two-body sum
  return 2.0 * one + 2.0 * two;
}

std::size_t vvvv_included(const TermSet& terms, const OrbitalPartition& partition) {
  std::size_t n = 0;
  for (int p : partition.virtual_orbitals)
    for (int q : partition.virtual_orbitals)
      for (int r : partition.virtual_orbitals)
        for (int s : partition.virtual_orbitals)
          if (terms.contains_two(p, q, r, s)) ++n;
  return n;
}

std::size_t vvvv_tuples_in_class(const TermKey& key, const OrbitalPartition& partition, TermGrouping grouping) {
  if (key.kind != TermKind::two_body) return 0;
  const auto virt = virtual_mask(partition);
  for (int x : key.idx)
    if (!virt[static_cast<std::size_t>(x)]) return 0;
  return class_members(key, grouping).size();
}

CountReport count_report(const TermSet& terms, const OrbitalPartition& partition) {
  if (terms.norb() != partition.norb()) throw DomainError("term set and partition disagree on orbital count");
  CountReport r;
  r.one_body_total = terms.total_tuples(TermKind::one_body);
  r.two_body_total = terms.total_tuples(TermKind::two_body);
  r.included_one_body = terms.included_tuples(TermKind::one_body);
  r.included_two_body = terms.included_tuples(TermKind::two_body);
  r.excluded_two_body = r.two_body_total - r.included_two_body;
  const std::size_t nv = partition.virtual_orbitals.size();
  r.vvvv_total = nv * nv * nv * nv;
  r.vvvv_included = vvvv_included(terms, partition);
  return r;
}

void write_term_set(const TermSet& terms, std::ostream& out) {
  for (const auto& k : terms.included_classes()) out << k.to_string() << '\n';
  if (!out) throw IoError("failed writing term set");
}

TermSet read_term_set(std::istream& in, int norb, TermGrouping grouping) {
  TermSet terms(norb, grouping);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string tag;
    if (!(ss >> tag)) continue;
    TermKey key;
    int n = 0;
    if (tag == "1b") {
      key.kind = TermKind::one_body;
      n = 2;
    } else if (tag == "2b") {
      key.kind = TermKind::two_body;
      n = 4;
    } else {
      throw ParseError("unknown term tag '" + tag + "'", lineno);
    }
    for (int i = 0; i < n; ++i)
      if (!(ss >> key.idx[static_cast<std::size_t>(i)])) throw ParseError("missing term index", lineno);
    terms.insert(key);
  }
  return terms;
}

}  // namespace squish
