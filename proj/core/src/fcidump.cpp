#include "squish/fcidump.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "squish/error.hpp"

namespace squish {

namespace {

constexpr int kMaxOrbitals = 64;
constexpr double kConflictTolerance = 1e-10;

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

// Accepts Fortran "D" exponents.
bool parse_real(std::string token, double& out) {
  std::replace(token.begin(), token.end(), 'D', 'E');
  std::replace(token.begin(), token.end(), 'd', 'e');
  char* end = nullptr;
  out = std::strtod(token.c_str(), &end);
  return end != token.c_str() && *end == '\0';
}

bool parse_int(const std::string& token, int& out) {
  char* end = nullptr;
  long v = std::strtol(token.c_str(), &end, 10);
  if (end == token.c_str() || *end != '\0') return false;
  out = static_cast<int>(v);
  return true;
}

struct HeaderToken {
  std::string text;
  std::size_t line;
};

FcidumpHeader parse_header(const std::vector<HeaderToken>& tokens, std::size_t header_line) {
  FcidumpHeader h;
  bool have_norb = false;
  bool have_nelec = false;
  std::string key;
  std::size_t key_line = header_line;
  std::vector<HeaderToken> values;

  auto flush = [&]() {
    if (key.empty()) return;
    auto single = [&](int& dst) {
      if (values.size() != 1 || !parse_int(values[0].text, dst))
        throw ParseError("malformed value for " + key, key_line);
    };
    if (key == "NORB") {
      single(h.norb);
      have_norb = true;
    } else if (key == "NELEC") {
      single(h.nelec);
      have_nelec = true;
    } else if (key == "MS2") {
      single(h.ms2);
    } else if (key == "ISYM") {
      single(h.isym);
    } else if (key == "ORBSYM") {
      h.orbsym.clear();
      for (const auto& v : values) {
        int s = 0;
        if (!parse_int(v.text, s)) throw ParseError("malformed ORBSYM entry '" + v.text + "'", v.line);
        h.orbsym.push_back(s);
      }
    }
    // Other namelist keys (UHF, IUHF, ...) are accepted and ignored.
    key.clear();
    values.clear();
  };

  for (const auto& tok : tokens) {
    auto eq = tok.text.find('=');
    if (eq == std::string::npos) {
      if (key.empty()) throw ParseError("value '" + tok.text + "' without a key", tok.line);
      values.push_back(tok);
      continue;
    }
    flush();
    key = upper(tok.text.substr(0, eq));
    key_line = tok.line;
    std::string rest = tok.text.substr(eq + 1);
    if (!rest.empty()) values.push_back({rest, tok.line});
  }
  flush();

  if (!have_norb) throw ParseError("header is missing NORB", header_line);
  if (!have_nelec) throw ParseError("header is missing NELEC", header_line);
  try {
    h.validate();
  } catch (const DomainError& e) {
    throw ParseError(e.what(), header_line);
  }
  if (h.norb > kMaxOrbitals)
    throw UnsupportedError("NORB=" + std::to_string(h.norb) + " exceeds the 64-orbital limit");
  return h;
}

class TableFiller {
 public:
  explicit TableFiller(IntegralTable& t)
      : t_(t), set1_(t.one_body_data().size(), 0), set2_(t.two_body_data().size(), 0) {}

  void one(int p, int q, double v, std::size_t line) {
    assign(t_.one_body_data(), set1_, t_.idx2(p, q), v, line);
    assign(t_.one_body_data(), set1_, t_.idx2(q, p), v, line);
  }

  // Chemist (ij|kl); physicist h(p,q,r,s) = (pr|qs).
  void two(int i, int j, int k, int l, double v, std::size_t line) {
    const std::array<std::array<int, 4>, 8> images{{{i, j, k, l},
                                                    {j, i, k, l},
                                                    {i, j, l, k},
                                                    {j, i, l, k},
                                                    {k, l, i, j},
                                                    {l, k, i, j},
                                                    {k, l, j, i},
                                                    {l, k, j, i}}};
    for (const auto& c : images)
      assign(t_.two_body_data(), set2_, t_.idx4(c[0], c[2], c[1], c[3]), v, line);
  }

  void core(double v, std::size_t line) {
    if (core_set_ && std::abs(t_.core_energy() - v) > kConflictTolerance)
      throw ConflictError("line " + std::to_string(line) + ": conflicting core energy");
    t_.set_core_energy(v);
    core_set_ = true;
  }

 private:
  static void assign(std::vector<double>& data, std::vector<unsigned char>& flags, std::size_t at,
                     double v, std::size_t line) {
    if (flags[at] && std::abs(data[at] - v) > kConflictTolerance)
      throw ConflictError("line " + std::to_string(line) + ": integral conflicts with an earlier symmetry image");
    data[at] = v;
    flags[at] = 1;
  }

  IntegralTable& t_;
  std::vector<unsigned char> set1_;
  std::vector<unsigned char> set2_;
  bool core_set_ = false;
};

// "NORB = 6" -> "NORB=6"
std::string collapse_equals(const std::string& line) {
  std::string out;
  out.reserve(line.size());
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '=') {
      while (!out.empty() && std::isspace(static_cast<unsigned char>(out.back()))) out.pop_back();
      out.push_back('=');
      while (i + 1 < line.size() && std::isspace(static_cast<unsigned char>(line[i + 1]))) ++i;
    } else {
      out.push_back(line[i]);
    }
  }
  return out;
}

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void FcidumpHeader::validate() const {
  if (norb < 1) throw DomainError("NORB must be at least 1");
  if (nelec < 0 || nelec > 2 * norb) throw DomainError("NELEC must lie in [0, 2*NORB]");
  if (std::abs(ms2) > nelec) throw DomainError("|MS2| must not exceed NELEC");
  if ((nelec + ms2) % 2 != 0) throw DomainError("NELEC + MS2 must be even");
}

IntegralTable::IntegralTable(FcidumpHeader header)
    : header_(std::move(header)),
      m_(static_cast<std::size_t>(header_.norb)),
      one_body_(m_ * m_, 0.0),
      two_body_(m_ * m_ * m_ * m_, 0.0) {}

double IntegralTable::symmetry_violation() const {
  const int m = norb();
  double worst = 0.0;
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q) worst = std::max(worst, std::abs(one_body(p, q) - one_body(q, p)));
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s) {
          const double v = two_body(p, q, r, s);
          worst = std::max(worst, std::abs(v - two_body(s, r, q, p)));
          worst = std::max(worst, std::abs(v - two_body(q, p, s, r)));
        }
  return worst;
}

bool IntegralTable::has_permutational_symmetry(double tol) const {
  const int m = norb();
  if (symmetry_violation() > tol) return false;
  for (int p = 0; p < m; ++p)
    for (int q = 0; q < m; ++q)
      for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s) {
          const double v = two_body(p, q, r, s);
          if (std::abs(v - two_body(r, q, p, s)) > tol) return false;
          if (std::abs(v - two_body(p, s, r, q)) > tol) return false;
        }
  return true;
}

bool OrbitalPartition::is_virtual(int p) const {
  return std::find(virtual_orbitals.begin(), virtual_orbitals.end(), p) != virtual_orbitals.end();
}

IntegralTable parse_fcidump(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<HeaderToken> tokens;
  std::size_t header_line = 0;
  bool in_header = false;
  bool header_done = false;

  while (!header_done && std::getline(in, line)) {
    ++lineno;
    std::string work = collapse_equals(line);
    std::replace(work.begin(), work.end(), ',', ' ');
    std::istringstream ss(work);
    std::string tok;
    while (ss >> tok) {
      const std::string up = upper(tok);
      if (!in_header) {
        if (up.rfind("&FCI", 0) != 0)
          throw ParseError("expected '&FCI' namelist header, got '" + tok + "'", lineno);
        in_header = true;
        header_line = lineno;
        if (tok.size() > 4) tokens.push_back({tok.substr(4), lineno});
        continue;
      }
      if (up == "/" || up == "&END" || up == "$END" || up == "&") {
        header_done = true;
        break;
      }
      if (!up.empty() && up.back() == '/') {
        if (tok.size() > 1) tokens.push_back({tok.substr(0, tok.size() - 1), lineno});
        header_done = true;
        break;
      }
      tokens.push_back({tok, lineno});
    }
  }
  if (!in_header) throw ParseError("empty input", lineno);
  if (!header_done) throw ParseError("unterminated namelist header", header_line);

  IntegralTable table(parse_header(tokens, header_line));
  TableFiller fill(table);
  const int m = table.norb();

  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string vtok;
    if (!(ss >> vtok)) continue;
    double value = 0.0;
    if (!parse_real(vtok, value)) throw ParseError("malformed integral value '" + vtok + "'", lineno);
    std::array<int, 4> ix{};
    for (int& x : ix) {
      std::string t;
      if (!(ss >> t) || !parse_int(t, x)) throw ParseError("expected four integer indices", lineno);
    }
    for (int x : ix)
      if (x < 0 || x > m)
        throw IndexError("line " + std::to_string(lineno) + ": index " + std::to_string(x) +
                         " outside [1, " + std::to_string(m) + "]");
    const auto [i, j, k, l] = ix;
    if (i && j && k && l) {
      fill.two(i - 1, j - 1, k - 1, l - 1, value, lineno);
    } else if (i && j && !k && !l) {
      fill.one(i - 1, j - 1, value, lineno);
    } else if (!i && !j && !k && !l) {
      fill.core(value, lineno);
    } else if (i && !j && !k && !l) {
      // orbital energy record; not part of the Hamiltonian
    } else {
      throw ParseError("unrecognised index pattern", lineno);
    }
  }
  return table;
}

IntegralTable read_fcidump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_fcidump(in);
}

void write_fcidump(const IntegralTable& table, std::ostream& out) {
  if (!table.has_permutational_symmetry())
    throw DomainError("FCIDUMP output requires 8-fold permutational symmetry");
  const auto& h = table.header();
  const int m = table.norb();
  out << " &FCI NORB=" << h.norb << ",NELEC=" << h.nelec << ",MS2=" << h.ms2 << ",\n  ORBSYM=";
  for (int p = 0; p < m; ++p)
    out << (p < static_cast<int>(h.orbsym.size()) ? h.orbsym[p] : 1) << ',';
  out << "\n  ISYM=" << h.isym << ",\n &END\n";

  auto pair = [](int a, int b) { return a * (a + 1) / 2 + b; };
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l <= k; ++l) {
          if (pair(k, l) > pair(i, j)) continue;
          const double v = table.two_body(i, k, j, l);
          if (v != 0.0)
            out << format_real(v) << ' ' << i + 1 << ' ' << j + 1 << ' ' << k + 1 << ' ' << l + 1 << '\n';
        }
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = table.one_body(i, j);
      if (v != 0.0) out << format_real(v) << ' ' << i + 1 << ' ' << j + 1 << " 0 0\n";
    }
  out << format_real(table.core_energy()) << " 0 0 0 0\n";
  if (!out) throw IoError("failed writing FCIDUMP");
}

void write_fcidump(const IntegralTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_fcidump(table, out);
}

OrbitalPartition classify_orbitals(const FcidumpHeader& header) {
  if (header.ms2 != 0) throw UnsupportedError("orbital classification requires a closed-shell reference (MS2=0)");
  header.validate();
  OrbitalPartition part;
  const int nocc = (header.nelec + 1) / 2;
  for (int p = 0; p < header.norb; ++p) (p < nocc ? part.occupied : part.virtual_orbitals).push_back(p);
  return part;
}

}  // namespace squish
