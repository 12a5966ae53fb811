#include "squish/cispace.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "squish/error.hpp"

namespace squish {

namespace {

std::uint64_t low_bits(int n) { return n >= 64 ? ~0ull : ((1ull << n) - 1); }

std::vector<int> bits_of(std::uint64_t mask) {
  std::vector<int> out;
  while (mask) {
    out.push_back(std::countr_zero(mask));
    mask &= mask - 1;
  }
  return out;
}

// Occupation string over 2M spin orbitals with a running fermionic sign.
struct FermionString {
  std::uint64_t alpha;
  std::uint64_t beta;
  int m;
  int sign = 1;

  bool occupied(int so) const {
    return so < m ? (alpha >> so) & 1u : (beta >> (so - m)) & 1u;
  }
  int parity_below(int so) const {
    if (so < m) return std::popcount(alpha & low_bits(so));
    return std::popcount(alpha) + std::popcount(beta & low_bits(so - m));
  }
  bool annihilate(int so) {
    if (!occupied(so)) return false;
    if (parity_below(so) & 1) sign = -sign;
    (so < m ? alpha : beta) &= ~(1ull << (so < m ? so : so - m));
    return true;
  }
  bool create(int so) {
    if (occupied(so)) return false;
    if (parity_below(so) & 1) sign = -sign;
    (so < m ? alpha : beta) |= 1ull << (so < m ? so : so - m);
    return true;
  }
};

// Spin orbitals set in `a` but not in `b`, ascending.
std::vector<int> spin_orbital_difference(const Determinant& a, const Determinant& b, int m) {
  std::vector<int> out;
  for (int p : bits_of(a.alpha & ~b.alpha)) out.push_back(p);
  for (int p : bits_of(a.beta & ~b.beta)) out.push_back(p + m);
  return out;
}

std::vector<int> occupied_spin_orbitals(const Determinant& d, int m) {
  std::vector<int> out = bits_of(d.alpha);
  for (int p : bits_of(d.beta)) out.push_back(p + m);
  return out;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

std::vector<std::uint64_t> combinations(int n, int k) {
  std::vector<std::uint64_t> out;
  if (k == 0) {
    out.push_back(0);
    return out;
  }
  // Gosper's hack enumerates k-subsets in increasing numeric order.
  std::uint64_t v = low_bits(k);
  const std::uint64_t limit = n >= 64 ? ~0ull : (1ull << n);
  while (true) {
    out.push_back(v);
    const std::uint64_t c = v & (~v + 1);
    const std::uint64_t r = v + c;
    if (r == 0) break;
    v = (((r ^ v) >> 2) / c) | r;
    if (n < 64 && v >= limit) break;
  }
  return out;
}

}  // namespace

int excitation_rank(const Determinant& a, const Determinant& b) {
  return (std::popcount(a.alpha ^ b.alpha) + std::popcount(a.beta ^ b.beta)) / 2;
}

Sector Sector::from_header(const FcidumpHeader& header) {
  header.validate();
  return {header.norb, (header.nelec + header.ms2) / 2, (header.nelec - header.ms2) / 2};
}

bool Sector::contains(const Determinant& d) const {
  const std::uint64_t outside = ~low_bits(norb);
  return (d.alpha & outside) == 0 && (d.beta & outside) == 0 && std::popcount(d.alpha) == n_alpha &&
         std::popcount(d.beta) == n_beta;
}

Determinant hf_determinant(const Sector& sector) { return {low_bits(sector.n_alpha), low_bits(sector.n_beta)}; }

CiBasis::CiBasis(Sector sector, std::vector<Determinant> dets) : sector_(sector), dets_(std::move(dets)) {
  std::sort(dets_.begin(), dets_.end());
  dets_.erase(std::unique(dets_.begin(), dets_.end()), dets_.end());
  index_.reserve(dets_.size());
  for (std::size_t i = 0; i < dets_.size(); ++i) {
    if (!sector_.contains(dets_[i])) throw DomainError("determinant outside the basis sector");
    index_.emplace(dets_[i], i);
  }
}

std::optional<std::size_t> CiBasis::find(const Determinant& d) const {
  auto it = index_.find(d);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

CiBasis enumerate_basis(const Sector& sector, std::size_t cap) {
  if (sector.norb < 1 || sector.norb > 64) throw DomainError("orbital count must lie in [1, 64]");
  if (sector.n_alpha < 0 || sector.n_beta < 0 || sector.n_alpha > sector.norb || sector.n_beta > sector.norb)
    throw DomainError("infeasible electron counts for " + std::to_string(sector.norb) + " orbitals");
  const double size = binomial(sector.norb, sector.n_alpha) * binomial(sector.norb, sector.n_beta);
  if (size > static_cast<double>(cap))
    throw CapacityError("determinant space of " + std::to_string(static_cast<long long>(size)) +
                        " exceeds the cap of " + std::to_string(cap));
  const auto alphas = combinations(sector.norb, sector.n_alpha);
  const auto betas = combinations(sector.norb, sector.n_beta);
  std::vector<Determinant> dets;
  dets.reserve(alphas.size() * betas.size());
  for (auto a : alphas)
    for (auto b : betas) dets.push_back({a, b});
  return CiBasis(sector, std::move(dets));
}

CiBasis enumerate_basis(int norb, int nelec, int ms2, std::size_t cap) {
  if (nelec < 0 || std::abs(ms2) > nelec || (nelec + ms2) % 2 != 0)
    throw DomainError("inconsistent electron count and spin projection");
  return enumerate_basis(Sector{norb, (nelec + ms2) / 2, (nelec - ms2) / 2}, cap);
}

void for_each_connection(const Determinant& det, int norb, const std::function<void(const Determinant&)>& fn) {
  const std::uint64_t all = low_bits(norb);
  const auto occ_a = bits_of(det.alpha);
  const auto vir_a = bits_of(all & ~det.alpha);
  const auto occ_b = bits_of(det.beta);
  const auto vir_b = bits_of(all & ~det.beta);

  auto singles = [](std::uint64_t s, const std::vector<int>& occ, const std::vector<int>& vir) {
    std::vector<std::uint64_t> out;
    for (int i : occ)
      for (int a : vir) out.push_back((s & ~(1ull << i)) | (1ull << a));
    return out;
  };
  auto doubles = [](std::uint64_t s, const std::vector<int>& occ, const std::vector<int>& vir) {
    std::vector<std::uint64_t> out;
    for (std::size_t i = 0; i < occ.size(); ++i)
      for (std::size_t j = i + 1; j < occ.size(); ++j)
        for (std::size_t a = 0; a < vir.size(); ++a)
          for (std::size_t b = a + 1; b < vir.size(); ++b)
            out.push_back((s & ~(1ull << occ[i]) & ~(1ull << occ[j])) | (1ull << vir[a]) | (1ull << vir[b]));
    return out;
  };

  const auto sa = singles(det.alpha, occ_a, vir_a);
  const auto sb = singles(det.beta, occ_b, vir_b);
  for (auto a : sa) fn({a, det.beta});
  for (auto b : sb) fn({det.alpha, b});
  for (auto a : doubles(det.alpha, occ_a, vir_a)) fn({a, det.beta});
  for (auto b : doubles(det.beta, occ_b, vir_b)) fn({det.alpha, b});
  for (auto a : sa)
    for (auto b : sb) fn({a, b});
}

SparseSymMatrix::SparseSymMatrix(std::vector<double> diagonal, std::vector<std::size_t> row_ptr,
                                 std::vector<std::size_t> cols, std::vector<double> values)
    : diagonal_(std::move(diagonal)), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), values_(std::move(values)) {
  if (row_ptr_.size() != diagonal_.size() + 1 || cols_.size() != values_.size() || row_ptr_.back() != values_.size())
    throw DomainError("inconsistent sparse matrix storage");
}

SparseSymMatrix SparseSymMatrix::from_dense(std::span<const double> dense, std::size_t dim) {
  std::vector<double> diag(dim);
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  for (std::size_t i = 0; i < dim; ++i) {
    diag[i] = dense[i * dim + i];
    for (std::size_t j = 0; j < i; ++j)
      if (dense[i * dim + j] != 0.0) {
        cols.push_back(j);
        vals.push_back(dense[i * dim + j]);
      }
    row_ptr.push_back(cols.size());
  }
  return SparseSymMatrix(std::move(diag), std::move(row_ptr), std::move(cols), std::move(vals));
}

void SparseSymMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = dimension();
  for (std::size_t i = 0; i < n; ++i) y[i] = diagonal_[i] * x[i];
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    const double xi = x[i];
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      const std::size_t j = cols_[k];
      acc += values_[k] * x[j];
      y[j] += values_[k] * xi;
    }
    y[i] += acc;
  }
}

double SparseSymMatrix::element(std::size_t i, std::size_t j) const {
  if (i == j) return diagonal_[i];
  if (j > i) std::swap(i, j);
  auto first = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
  auto last = cols_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
  auto it = std::lower_bound(first, last, j);
  return (it != last && *it == j) ? values_[static_cast<std::size_t>(it - cols_.begin())] : 0.0;
}

std::vector<double> SparseSymMatrix::to_dense() const {
  const std::size_t n = dimension();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    out[i * n + i] = diagonal_[i];
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      out[i * n + cols_[k]] = values_[k];
      out[cols_[k] * n + i] = values_[k];
    }
  }
  return out;
}

SlaterCondon::SlaterCondon(const IntegralTable& table, const TermSet* terms)
    : table_(table), terms_(terms), m_(table.norb()) {
  if (terms_ && terms_->norb() != m_) throw DomainError("term set and integral table disagree on orbital count");
}

double SlaterCondon::h1(int p, int q) const {
  if (terms_ && !terms_->contains_one(p, q)) return 0.0;
  return table_.one_body(p, q);
}

double SlaterCondon::h2(int p, int q, int r, int s) const {
  if (!terms_) return table_.two_body(p, q, r, s);
  const double a = terms_->contains_two(p, q, r, s) ? table_.two_body(p, q, r, s) : 0.0;
  const double b = terms_->contains_two(q, p, s, r) ? table_.two_body(q, p, s, r) : 0.0;
  return 0.5 * (a + b);
}

double SlaterCondon::v(int P, int Q, int R, int S) const {
  const bool sp = P < m_, sq = Q < m_, sr = R < m_, ss = S < m_;
  if (sp != sr || sq != ss) return 0.0;
  return h2(P % m_, Q % m_, R % m_, S % m_);
}

double SlaterCondon::diagonal(const Determinant& d) const {
  const auto occ = occupied_spin_orbitals(d, m_);
  double e = 0.0;
  for (int I : occ) e += h1(I % m_, I % m_);
  double two = 0.0;
  for (int I : occ)
    for (int J : occ) two += v(I, J, I, J) - v(I, J, J, I);
  return e + 0.5 * two;
}

double SlaterCondon::element(const Determinant& bra, const Determinant& ket) const {
  const int rank = excitation_rank(bra, ket);
  if (rank == 0) return diagonal(ket);
  if (rank > 2) return 0.0;
  const auto holes = spin_orbital_difference(ket, bra, m_);
  const auto parts = spin_orbital_difference(bra, ket, m_);
  if (holes.size() != parts.size()) return 0.0;

  FermionString f{ket.alpha, ket.beta, m_};
  if (rank == 1) {
    const int H = holes[0], P = parts[0];
    f.annihilate(H);
    f.create(P);
    if ((H < m_) != (P < m_)) return 0.0;
    double e = h1(P % m_, H % m_);
    for (int J : occupied_spin_orbitals(ket, m_)) {
      if (J == H) continue;
      e += v(P, J, H, J) - v(P, J, J, H);
    }
    return f.sign * e;
  }
  const int H1 = holes[0], H2 = holes[1], P1 = parts[0], P2 = parts[1];
  f.annihilate(H1);
  f.annihilate(H2);
  f.create(P2);
  f.create(P1);
  return f.sign * (v(P1, P2, H1, H2) - v(P1, P2, H2, H1));
}

double matrix_element(const Determinant& d1, const Determinant& d2, const IntegralTable& table,
                      const TermSet& terms) {
  if (std::popcount(d1.alpha) != std::popcount(d2.alpha) || std::popcount(d1.beta) != std::popcount(d2.beta))
    throw DomainError("determinants belong to different particle sectors");
  return SlaterCondon(table, &terms).element(d1, d2);
}

namespace {

SparseSymMatrix assemble(const CiBasis& basis, const SlaterCondon& sc, std::size_t nonzero_budget) {
  const std::size_t n = basis.size();
  if (n == 0) throw DomainError("cannot build a matrix over an empty basis");
  std::size_t per_row = 0;
  for_each_connection(basis[0], basis.sector().norb, [&](const Determinant&) { ++per_row; });
  const double estimate = static_cast<double>(n) * std::min<double>(static_cast<double>(per_row), static_cast<double>(n)) / 2.0;
  if (estimate > static_cast<double>(nonzero_budget))
    throw CapacityError("estimated " + std::to_string(static_cast<long long>(estimate)) +
                        " nonzeros exceed the budget of " + std::to_string(nonzero_budget));

  std::vector<double> diag(n);
  std::vector<std::vector<std::pair<std::size_t, double>>> rows(n);
  const int norb = basis.sector().norb;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const Determinant& di = basis[i];
    diag[i] = sc.diagonal(di);
    auto& row = rows[i];
    for_each_connection(di, norb, [&](const Determinant& dj) {
      auto j = basis.find(dj);
      if (!j || *j >= i) return;
      const double val = sc.element(di, dj);
      if (val != 0.0) row.emplace_back(*j, val);
    });
    std::sort(row.begin(), row.end());
  }
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  for (const auto& row : rows) {
    for (const auto& [j, val] : row) {
      cols.push_back(j);
      vals.push_back(val);
    }
    row_ptr.push_back(cols.size());
  }
  return SparseSymMatrix(std::move(diag), std::move(row_ptr), std::move(cols), std::move(vals));
}

}  // namespace

SparseSymMatrix build_matrix(const CiBasis& basis, const IntegralTable& table, const TermSet& terms,
                             std::size_t nonzero_budget) {
  return assemble(basis, SlaterCondon(table, &terms), nonzero_budget);
}

SparseSymMatrix build_matrix(const CiBasis& basis, const IntegralTable& table) {
  return assemble(basis, SlaterCondon(table, nullptr), kDefaultNonzeroBudget);
}

double hf_energy(const IntegralTable& table, const OrbitalPartition& partition) {
  if (table.header().ms2 != 0 || table.header().nelec % 2 != 0)
    throw UnsupportedError("Hartree-Fock energy requires a closed-shell reference");
  double e = table.core_energy();
  for (int i : partition.occupied) e += 2.0 * table.one_body(i, i);
  for (int i : partition.occupied)
    for (int j : partition.occupied)
      e += 2.0 * table.two_body(i, j, i, j) - table.two_body(i, j, j, i);
  return e;
}

}  // namespace squish
