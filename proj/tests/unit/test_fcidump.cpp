#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "random_system.hpp"
#include "squish/cispace.hpp"
#include "squish/error.hpp"
#include "squish/fcidump.hpp"

using namespace squish;

namespace {

IntegralTable parse(const std::string& text) {
  std::istringstream in(text);
  return parse_fcidump(in);
}

double max_diff(const IntegralTable& a, const IntegralTable& b) {
  double d = std::abs(a.core_energy() - b.core_energy());
  for (std::size_t i = 0; i < a.one_body_data().size(); ++i)
    d = std::max(d, std::abs(a.one_body_data()[i] - b.one_body_data()[i]));
  for (std::size_t i = 0; i < a.two_body_data().size(); ++i)
    d = std::max(d, std::abs(a.two_body_data()[i] - b.two_body_data()[i]));
  return d;
}

IntegralTable round_trip(const IntegralTable& t) {
  std::stringstream s;
  write_fcidump(t, s);
  return parse_fcidump(s);
}

}  // namespace

TEST(Fcidump, HeaderGivesOrbitalAndElectronCounts) {
  const auto t = parse("&FCI NORB=6, NELEC=4, MS2=0,\n ORBSYM=1,1,1,1,1,1,\n ISYM=1,\n&END\n 0.5 1 1 1 1\n");
  EXPECT_EQ(t.norb(), 6);
  EXPECT_EQ(t.header().nelec, 4);
  EXPECT_EQ(t.header().ms2, 0);
  EXPECT_EQ(t.header().orbsym.size(), 6u);
}

TEST(Fcidump, CoreEnergyOnlyLine) {
  const auto t = parse("&FCI NORB=2, NELEC=2, MS2=0 /\n 0.5 0 0 0 0\n");
  EXPECT_DOUBLE_EQ(t.core_energy(), 0.5);
  for (double v : t.one_body_data()) EXPECT_EQ(v, 0.0);
  for (double v : t.two_body_data()) EXPECT_EQ(v, 0.0);
}

TEST(Fcidump, ChemistLineFillsExactlyItsPhysicistImages) {
  const auto t = parse("&FCI NORB=2, NELEC=2, MS2=0 /\n 1.0 1 1 2 2\n");
  // Brute force: every chemist permutation of (0,0|1,1), mapped through h(p,q,r,s) = (pr|qs).
  std::set<std::array<int, 4>> expected;
  const std::array<int, 4> c{0, 0, 1, 1};
  const int perms[8][4] = {{0, 1, 2, 3}, {1, 0, 2, 3}, {0, 1, 3, 2}, {1, 0, 3, 2},
                           {2, 3, 0, 1}, {3, 2, 0, 1}, {2, 3, 1, 0}, {3, 2, 1, 0}};
  for (const auto& p : perms) {
    const int i = c[p[0]], j = c[p[1]], k = c[p[2]], l = c[p[3]];
    expected.insert({i, k, j, l});
  }
  EXPECT_EQ(t.two_body(0, 1, 0, 1), 1.0);
  for (int p = 0; p < 2; ++p)
    for (int q = 0; q < 2; ++q)
      for (int r = 0; r < 2; ++r)
        for (int s = 0; s < 2; ++s)
          EXPECT_EQ(t.two_body(p, q, r, s), expected.count({p, q, r, s}) ? 1.0 : 0.0) << p << q << r << s;
}

TEST(Fcidump, OneBodyLineIsSymmetrized) {
  const auto t = parse("&FCI NORB=3, NELEC=2, MS2=0 /\n -0.25 3 1 0 0\n");
  EXPECT_EQ(t.one_body(2, 0), -0.25);
  EXPECT_EQ(t.one_body(0, 2), -0.25);
}

TEST(Fcidump, AcceptsFortranExponentsAndLooseHeaders) {
  const auto t = parse(" &FCI NORB = 2 ,NELEC= 2,\n  MS2 =0, ORBSYM=1,1, ISYM=1\n &END\n 1.5D-01 1 1 1 1\n 2.0d0 0 0 0 0\n");
  EXPECT_DOUBLE_EQ(t.two_body(0, 0, 0, 0), 0.15);
  EXPECT_DOUBLE_EQ(t.core_energy(), 2.0);
}

TEST(Fcidump, SlashTerminatorOnOwnLine) {
  const auto t = parse("&FCI NORB=1,NELEC=2,MS2=0,\n/\n 0.7 1 1 1 1\n");
  EXPECT_DOUBLE_EQ(t.two_body(0, 0, 0, 0), 0.7);
}

TEST(Fcidump, MalformedHeaderReportsLine) {
  try {
    parse("&FCI NORB=x, NELEC=2 /\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
  EXPECT_THROW(parse("&FCI NELEC=2 /\n"), ParseError);
  EXPECT_THROW(parse("&FCI NORB=2, NELEC=2 /\n 1.0 1 x 0 0\n"), ParseError);
  try {
    parse("&FCI NORB=2, NELEC=2 /\n 1.0 1 1 0 0\n bogus 1 1 0 0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Fcidump, IndexOutOfRange) {
  EXPECT_THROW(parse("&FCI NORB=2, NELEC=2 /\n 1.0 3 1 0 0\n"), IndexError);
  EXPECT_THROW(parse("&FCI NORB=2, NELEC=2 /\n 1.0 1 1 1 -1\n"), IndexError);
}

TEST(Fcidump, InconsistentDuplicateIsAConflict) {
  EXPECT_THROW(parse("&FCI NORB=2, NELEC=2 /\n 1.0 1 1 2 2\n 1.1 2 2 1 1\n"), ConflictError);
  EXPECT_NO_THROW(parse("&FCI NORB=2, NELEC=2 /\n 1.0 1 1 2 2\n 1.00000000001 2 2 1 1\n"));
  EXPECT_THROW(parse("&FCI NORB=2, NELEC=2 /\n 1.0 0 0 0 0\n 2.0 0 0 0 0\n"), ConflictError);
}

TEST(Fcidump, InvalidHeaderInvariants) {
  EXPECT_THROW(parse("&FCI NORB=2, NELEC=5 /\n"), ParseError);
  EXPECT_THROW(parse("&FCI NORB=2, NELEC=2, MS2=1 /\n"), ParseError);
  EXPECT_THROW(parse("&FCI NORB=0, NELEC=0 /\n"), ParseError);
}

TEST(Fcidump, CoreOnlyTableWritesOneDataLine) {
  FcidumpHeader h;
  h.norb = 2;
  h.nelec = 2;
  IntegralTable t(h);
  t.set_core_energy(1.0);
  std::stringstream s;
  write_fcidump(t, s);
  std::string line, last;
  int data = 0;
  bool header_done = false;
  while (std::getline(s, line)) {
    if (!header_done) {
      header_done = line.find('/') != std::string::npos || line.find("&END") != std::string::npos;
      continue;
    }
    ++data;
    last = line;
  }
  EXPECT_EQ(data, 1);
  std::istringstream ls(last);
  double v;
  int i, j, k, l;
  ls >> v >> i >> j >> k >> l;
  EXPECT_EQ(v, 1.0);
  EXPECT_EQ(i + j + k + l, 0);
}

TEST(Fcidump, WriteToUnwritablePathIsIoError) {
  FcidumpHeader h;
  h.norb = 1;
  h.nelec = 2;
  EXPECT_THROW(write_fcidump(IntegralTable(h), "/nonexistent-dir/x.fcidump"), IoError);
  EXPECT_THROW(read_fcidump("/nonexistent-dir/x.fcidump"), IoError);
}

TEST(Fcidump, RoundTripRandomTables) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = 1 + trial % 5;
    const auto t = testsupport::random_table(m, std::min(2, 2 * m), 0, rng);
    EXPECT_LE(max_diff(t, round_trip(t)), 1e-12);
  }
}

TEST(Fcidump, RoundTripFixturesPreservesIntegralsAndHfEnergy) {
  for (const auto& name : testsupport::fixture_names()) {
    const auto t = testsupport::load_fixture(name);
    const auto back = round_trip(t);
    EXPECT_LE(max_diff(t, back), 1e-12) << name;
    const auto part = classify_orbitals(t.header());
    EXPECT_NEAR(hf_energy(t, part), hf_energy(back, part), 1e-12) << name;
  }
}

TEST(Fcidump, ParsedTwoBodyMatchesConjugatePartnerExactly) {
  for (const auto& name : testsupport::fixture_names()) {
    const auto t = testsupport::load_fixture(name);
    const int m = t.norb();
    for (int p = 0; p < m; ++p)
      for (int q = 0; q < m; ++q)
        for (int r = 0; r < m; ++r)
          for (int s = 0; s < m; ++s) ASSERT_EQ(t.two_body(p, q, r, s), t.two_body(s, r, q, p));
    EXPECT_EQ(t.symmetry_violation(), 0.0);
  }
}

TEST(Fcidump, ClassifyOrbitals) {
  FcidumpHeader h;
  h.norb = 6;
  h.nelec = 4;
  auto p = classify_orbitals(h);
  EXPECT_EQ(p.occupied, (std::vector<int>{0, 1}));
  EXPECT_EQ(p.virtual_orbitals, (std::vector<int>{2, 3, 4, 5}));
  h.nelec = 2;
  p = classify_orbitals(h);
  EXPECT_EQ(p.occupied, (std::vector<int>{0}));
  EXPECT_EQ(p.virtual_orbitals.size(), 5u);
  h.norb = 1;
  p = classify_orbitals(h);
  EXPECT_EQ(p.occupied, (std::vector<int>{0}));
  EXPECT_TRUE(p.virtual_orbitals.empty());
  h.norb = 4;
  h.nelec = 3;
  h.ms2 = 1;
  EXPECT_THROW(classify_orbitals(h), UnsupportedError);
}

TEST(Fcidump, FixtureHeaders) {
  EXPECT_EQ(testsupport::load_fixture("lih_sto3g").header().nelec, 4);
  EXPECT_EQ(testsupport::load_fixture("lih_sto3g").norb(), 6);
  EXPECT_EQ(testsupport::load_fixture("h2_ccpvdz_6orb").header().nelec, 2);
  EXPECT_EQ(testsupport::load_fixture("h3p_ccpvdz_6orb").header().nelec, 2);
}
