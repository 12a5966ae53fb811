#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "fixtures.hpp"
#include "fock_oracle.hpp"
#include "random_system.hpp"
#include "squish/rdm.hpp"

using namespace squish;

namespace {

struct Case {
  int m, nelec, ms2;
};

const Case kCases[] = {{2, 2, 0}, {3, 2, 0}, {3, 3, 1}, {3, 4, 0}, {4, 2, 0}, {4, 4, 0}, {4, 3, -1}, {4, 5, 1}, {4, 6, 0}};

}  // namespace

TEST(Rdm, HartreeFockDeterminant) {
  const auto basis = enumerate_basis(5, 4, 0);
  std::vector<double> amps(basis.size(), 0.0);
  amps[*basis.find(hf_determinant(basis.sector()))] = 1.0;
  const auto r = build_rdms(amps, basis);
  for (int p = 0; p < 5; ++p)
    for (int q = 0; q < 5; ++q) EXPECT_EQ(r.one(p, q), (p == q && p < 2) ? 2.0 : 0.0);
  EXPECT_NEAR(r.trace(), 4.0, 1e-14);
  EXPECT_NEAR(r.pair_count(), 12.0, 1e-14);
}

TEST(Rdm, SingleElectronHasNoPairs) {
  std::mt19937_64 rng(1);
  const auto basis = enumerate_basis(4, 1, 1);
  const auto r = build_rdms(testsupport::random_state(basis.size(), rng), basis);
  for (double v : r.Gamma) EXPECT_EQ(v, 0.0);
  EXPECT_NEAR(r.trace(), 1.0, 1e-12);
}

TEST(Rdm, MatchesFockSpaceOracleOnRandomStates) {
  std::mt19937_64 rng(2024);
  int cases = 0;
  for (int round = 0; round < 3; ++round)
    for (const auto& c : kCases) {
      const auto table = testsupport::random_table(c.m, c.nelec, c.ms2, rng);
      const auto basis = enumerate_basis(c.m, c.nelec, c.ms2);
      const auto amps = testsupport::random_state(basis.size(), rng);
      const oracle::FockSpace fock(c.m);
      const auto v = fock.lift(amps, basis);
      const auto r = build_rdms(amps, basis);
      for (int p = 0; p < c.m; ++p)
        for (int q = 0; q < c.m; ++q) {
          EXPECT_NEAR(r.one(p, q), oracle::FockSpace::expect(fock.one_body(p, q), v), 1e-12);
          for (int s = 0; s < c.m; ++s)
            for (int t = 0; t < c.m; ++t)
              EXPECT_NEAR(r.two(p, q, s, t), oracle::FockSpace::expect(fock.two_body(p, q, s, t), v), 1e-12);
        }
      // Every class contribution against the explicit operator expectation.
      const TermSet all = TermSet::full(c.m);
      double sum = 0.0;
      for (const auto& tc : term_contributions(r, table, all)) {
        TermSet only(c.m);
        only.insert(tc.key);
        EXPECT_NEAR(tc.epsilon, oracle::FockSpace::expect(fock.hamiltonian(table, &only), v), 1e-12);
        sum += tc.epsilon;
      }
      const double h = oracle::FockSpace::expect(fock.hamiltonian(table), v) + table.core_energy();
      EXPECT_NEAR(sum + table.core_energy(), h, 1e-10);
      EXPECT_NEAR(energy_from_rdms(r, table), h, 1e-10);
      EXPECT_NEAR(r.trace(), c.nelec, 1e-10);
      EXPECT_NEAR(r.pair_count(), c.nelec * (c.nelec - 1.0), 1e-10);
      ++cases;
    }
  EXPECT_GE(cases, 25);
}

TEST(Rdm, HermiticityAndPositivity) {
  std::mt19937_64 rng(77);
  const auto basis = enumerate_basis(5, 4, 0);
  const auto r = build_rdms(testsupport::random_state(basis.size(), rng), basis);
  Eigen::MatrixXd g(5, 5);
  for (int p = 0; p < 5; ++p)
    for (int q = 0; q < 5; ++q) {
      g(p, q) = r.one(p, q);
      EXPECT_NEAR(r.one(p, q), r.one(q, p), 1e-14);
      for (int s = 0; s < 5; ++s)
        for (int t = 0; t < 5; ++t) {
          EXPECT_NEAR(r.two(p, q, s, t), r.two(t, s, q, p), 1e-13);
          EXPECT_NEAR(r.two(p, q, s, t), r.two(q, p, t, s), 1e-13);
        }
    }
  EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().minCoeff(), -1e-10);
}

TEST(Rdm, RayleighQuotientOfEigenstates) {
  for (const auto& name : testsupport::fixture_names()) {
    const auto t = testsupport::load_fixture(name);
    const auto part = classify_orbitals(t.header());
    const auto basis = enumerate_basis(Sector::from_header(t.header()));
    const auto fci = lowest_eigenpairs(build_matrix(basis, t), 1, 1e-10)[0];
    EXPECT_NEAR(energy_from_rdms(build_rdms(fci, basis), t), fci.energy + t.core_energy(), 1e-9) << name;
    // Ground state of the truncated Hamiltonian: masked expectation is its eigenvalue.
    const auto terms = initial_term_set(part, InitialSet::no_vvvv);
    const auto st = lowest_eigenpairs(build_matrix(basis, t, terms), 1, 1e-10)[0];
    EXPECT_NEAR(energy_from_rdms(build_rdms(st, basis), t, terms), st.energy + t.core_energy(), 1e-9) << name;
  }
}

TEST(Rdm, EmptyMaskGivesCoreEnergy) {
  std::mt19937_64 rng(4);
  auto t = testsupport::random_table(3, 2, 0, rng);
  const auto basis = enumerate_basis(3, 2, 0);
  const auto r = build_rdms(testsupport::random_state(basis.size(), rng), basis);
  EXPECT_EQ(energy_from_rdms(r, t, TermSet(3)), t.core_energy());
}

TEST(Rdm, ZeroCoefficientClassContributesNothing) {
  std::mt19937_64 rng(4);
  auto t = testsupport::random_table(3, 2, 0, rng);
  t.set_two_body(0, 1, 2, 0, 0.0);
  t.set_two_body(0, 2, 1, 0, 0.0);
  const auto basis = enumerate_basis(3, 2, 0);
  const auto r = build_rdms(testsupport::random_state(basis.size(), rng), basis);
  TermSet pool(3);
  pool.insert(TermKey::two(0, 1, 2, 0));
  const auto c = term_contributions(r, t, pool);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].epsilon, 0.0);
}

TEST(Rdm, ContributionsPartitionTheEnergyForAnyState) {
  std::mt19937_64 rng(10);
  const auto t = testsupport::load_fixture("lih_sto3g");
  const auto basis = enumerate_basis(Sector::from_header(t.header()));
  const auto r = build_rdms(testsupport::random_state(basis.size(), rng), basis);
  double sum = t.core_energy();
  for (const auto& c : term_contributions(r, t, TermSet::full(6))) sum += c.epsilon;
  EXPECT_NEAR(sum, energy_from_rdms(r, t), 1e-10);
}

TEST(Rdm, SpinSquared) {
  const auto basis = enumerate_basis(4, 4, 0);
  std::vector<double> hf(basis.size(), 0.0);
  hf[*basis.find(hf_determinant(basis.sector()))] = 1.0;
  EXPECT_NEAR(spin_squared(hf, basis), 0.0, 1e-14);
  const auto one = enumerate_basis(2, 1, 1);
  std::vector<double> amps(one.size(), 0.0);
  amps[0] = 1.0;
  EXPECT_NEAR(spin_squared(amps, one), 0.75, 1e-14);
  // Open-shell singlet and triplet combinations of |a0 b1> and |a1 b0>.
  const auto two = enumerate_basis(2, 2, 0);
  std::vector<double> s(two.size(), 0.0), tr(two.size(), 0.0);
  const auto i = *two.find(Determinant{1, 2}), j = *two.find(Determinant{2, 1});
  s[i] = tr[i] = std::sqrt(0.5);
  s[j] = std::sqrt(0.5);
  tr[j] = -std::sqrt(0.5);
  const double a = spin_squared(s, two), b = spin_squared(tr, two);
  EXPECT_NEAR(std::min(a, b), 0.0, 1e-14);
  EXPECT_NEAR(std::max(a, b), 2.0, 1e-14);
}
