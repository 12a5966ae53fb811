#include "squish/rdm.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <unordered_map>

#include "squish/error.hpp"

namespace squish {

namespace {

// Single spin-orbital operator applied to a determinant, tracking sign.
// Spin orbital so < m is alpha orbital so, otherwise beta orbital so - m.
struct Ket {
  std::uint64_t a;
  std::uint64_t b;
  int sign;
};

inline bool bit(const Ket& k, int so, int m) { return so < m ? (k.a >> so) & 1u : (k.b >> (so - m)) & 1u; }

inline int parity(const Ket& k, int so, int m) {
  if (so < m) return std::popcount(k.a & ((1ull << so) - 1));
  return std::popcount(k.a) + std::popcount(k.b & ((1ull << (so - m)) - 1));
}

inline bool destroy(Ket& k, int so, int m) {
  if (!bit(k, so, m)) return false;
  if (parity(k, so, m) & 1) k.sign = -k.sign;
  if (so < m) k.a &= ~(1ull << so);
  else k.b &= ~(1ull << (so - m));
  return true;
}

inline bool create(Ket& k, int so, int m) {
  if (bit(k, so, m)) return false;
  if (parity(k, so, m) & 1) k.sign = -k.sign;
  if (so < m) k.a |= 1ull << so;
  else k.b |= 1ull << (so - m);
  return true;
}

}  // namespace

double RdmPair::trace() const {
  double t = 0.0;
  for (int p = 0; p < norb; ++p) t += one(p, p);
  return t;
}

double RdmPair::pair_count() const {
  double t = 0.0;
  for (int p = 0; p < norb; ++p)
    for (int q = 0; q < norb; ++q) t += two(p, q, p, q);
  return t;
}

RdmPair build_rdms(std::span<const double> amplitudes, const CiBasis& basis) {
  if (amplitudes.size() != basis.size()) throw DomainError("state and basis sizes differ");
  const int m = basis.sector().norb;
  const int n = 2 * m;
  const std::size_t m2 = static_cast<std::size_t>(m) * m;
  const std::size_t m4 = m2 * m2;
  RdmPair out{m, std::vector<double>(m2, 0.0), std::vector<double>(m4, 0.0)};

#pragma omp parallel
  {
    std::vector<double> g1(m2, 0.0), g2(m4, 0.0);
#pragma omp for schedule(dynamic, 32)
    for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(basis.size()); ++jj) {
      const auto j = static_cast<std::size_t>(jj);
      const double cj = amplitudes[j];
      if (cj == 0.0) continue;
      const Ket ket{basis[j].alpha, basis[j].beta, 1};
      for (int q = 0; q < n; ++q) {
        Ket k1 = ket;
        if (!destroy(k1, q, m)) continue;
        // One-body: a+_p a_q, same spin.
        const int lo = q < m ? 0 : m;
        for (int p = lo; p < lo + m; ++p) {
          Ket k2 = k1;
          if (!create(k2, p, m)) continue;
          if (auto i = basis.find({k2.a, k2.b}))
            g1[static_cast<std::size_t>(p % m) * m + q % m] += k2.sign * amplitudes[*i] * cj;
        }
        // Two-body: a+_P a+_Q a_S a_R with R = q destroyed first.
        for (int s = 0; s < n; ++s) {
          Ket k2 = k1;
          if (!destroy(k2, s, m)) continue;
          const int lo_s = s < m ? 0 : m;
          for (int qq = lo_s; qq < lo_s + m; ++qq) {
            Ket k3 = k2;
            if (!create(k3, qq, m)) continue;
            for (int p = lo; p < lo + m; ++p) {
              Ket k4 = k3;
              if (!create(k4, p, m)) continue;
              if (auto i = basis.find({k4.a, k4.b})) {
                const std::size_t at =
                    ((static_cast<std::size_t>(p % m) * m + qq % m) * m + q % m) * m + s % m;
                g2[at] += k4.sign * amplitudes[*i] * cj;
              }
            }
          }
        }
      }
    }
#pragma omp critical
    {
      for (std::size_t x = 0; x < m2; ++x) out.gamma[x] += g1[x];
      for (std::size_t x = 0; x < m4; ++x) out.Gamma[x] += g2[x];
    }
  }
  return out;
}

double energy_from_rdms(const RdmPair& rdms, const IntegralTable& table) {
  return energy_from_rdms(rdms, table, TermSet::full(table.norb()));
}

double energy_from_rdms(const RdmPair& rdms, const IntegralTable& table, const TermSet& terms) {
  if (rdms.norb != table.norb() || terms.norb() != table.norb())
    throw DomainError("orbital counts of RDMs, table and term set differ");
  const auto h1 = table.one_body_data();
  const auto h2 = table.two_body_data();
  const auto mask1 = terms.one_body_mask();
  const auto mask2 = terms.two_body_mask();
  double e1 = 0.0;
  for (std::size_t x = 0; x < h1.size(); ++x)
    if (mask1[x]) e1 += h1[x] * rdms.gamma[x];
  double e2 = 0.0;
  for (std::size_t x = 0; x < h2.size(); ++x)
    if (mask2[x]) e2 += h2[x] * rdms.Gamma[x];
  return e1 + 0.5 * e2 + table.core_energy();
}

std::vector<TermContribution> term_contributions(const RdmPair& rdms, const IntegralTable& table,
                                                 const TermSet& pool) {
  if (rdms.norb != table.norb() || pool.norb() != table.norb())
    throw DomainError("orbital counts of RDMs, table and term set differ");
  std::vector<TermContribution> out;
  for (const TermKey& key : pool.included_classes()) {
    double eps = 0.0;
    for (const TermKey& k : class_members(key, pool.grouping())) {
      const auto& i = k.idx;
      if (k.kind == TermKind::one_body) eps += table.one_body(i[0], i[1]) * rdms.one(i[0], i[1]);
      else eps += 0.5 * table.two_body(i[0], i[1], i[2], i[3]) * rdms.two(i[0], i[1], i[2], i[3]);
    }
    out.push_back({key, eps});
  }
  return out;
}

double spin_squared(std::span<const double> amplitudes, const CiBasis& basis) {
  if (amplitudes.size() != basis.size()) throw DomainError("state and basis sizes differ");
  const int m = basis.sector().norb;
  // S+ = sum_p a+_{p alpha} a_{p beta}; <S^2> = |S+ psi|^2 + Sz (Sz + 1).
  std::unordered_map<Determinant, double, DeterminantHash> raised;
  double norm = 0.0;
  for (std::size_t j = 0; j < basis.size(); ++j) {
    norm += amplitudes[j] * amplitudes[j];
    for (int p = 0; p < m; ++p) {
      Ket k{basis[j].alpha, basis[j].beta, 1};
      if (!destroy(k, p + m, m) || !create(k, p, m)) continue;
      raised[{k.a, k.b}] += k.sign * amplitudes[j];
    }
  }
  double s = 0.0;
  for (const auto& [d, c] : raised) s += c * c;
  const double sz = 0.5 * basis.sector().ms2();
  return s + sz * (sz + 1.0) * norm;
}

void write_rdms(const RdmPair& rdms, std::ostream& out) {
  char buf[32];
  const int m = rdms.norb;
  out << "norb " << m << "\n";
  for (int p = 0; p < m; ++p) {
    for (int q = 0; q < m; ++q) {
      std::snprintf(buf, sizeof buf, "%s%.17g", q ? " " : "", rdms.one(p, q));
      out << buf;
    }
    out << "\n";
  }
  for (std::size_t row = 0; row < static_cast<std::size_t>(m) * m * m; ++row) {
    for (int s = 0; s < m; ++s) {
      std::snprintf(buf, sizeof buf, "%s%.17g", s ? " " : "", rdms.Gamma[row * m + s]);
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace squish
