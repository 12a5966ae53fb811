#include "squish/eigensolver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "squish/error.hpp"

namespace squish {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void fix_sign(std::vector<double>& x) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < x.size(); ++i)
    if (std::abs(x[i]) > std::abs(x[best]) + 1e-14) best = i;
  if (!x.empty() && x[best] < 0)
    for (double& v : x) v = -v;
}

void matvec(const SparseSymMatrix& mat, const VectorXd& x, VectorXd& y) {
  y.resize(x.size());
  mat.multiply(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
               std::span<double>(y.data(), static_cast<std::size_t>(y.size())));
}

// Rotates the degenerate ground-level eigenvectors so the first one is the
// projection of `previous`. Columns of `vecs` are orthonormal eigenvectors.
void align_degenerate(MatrixXd& vecs, const std::vector<double>& evals, double tol, const std::vector<double>* previous,
                      std::vector<bool>& flags) {
  std::size_t g = 1;
  while (g < evals.size() && std::abs(evals[g] - evals[0]) < tol) ++g;
  if (g < 2) return;
  for (std::size_t i = 0; i < g; ++i) flags[i] = true;
  if (!previous || previous->size() != static_cast<std::size_t>(vecs.rows())) return;
  const Eigen::Map<const VectorXd> prev(previous->data(), static_cast<Eigen::Index>(previous->size()));
  MatrixXd block = vecs.leftCols(static_cast<Eigen::Index>(g));
  VectorXd c = block.transpose() * prev;
  if (c.norm() < 1e-12) return;
  // Orthonormal basis of the block whose first vector is along c (Householder).
  MatrixXd q = Eigen::HouseholderQR<MatrixXd>(c.normalized()).householderQ();
  if (q.col(0).dot(c) < 0) q.col(0) = -q.col(0);
  vecs.leftCols(static_cast<Eigen::Index>(g)) = block * q;
}

std::vector<CiState> finish(const SparseSymMatrix& mat, MatrixXd vecs, std::vector<double> evals, std::size_t J,
                            const EigenOptions& options) {
  std::vector<bool> flags(evals.size(), false);
  align_degenerate(vecs, evals, options.degeneracy_tol, options.previous, flags);
  // Degeneracy with the next unreturned root is also flagged.
  for (std::size_t i = 0; i + 1 < evals.size(); ++i)
    if (std::abs(evals[i + 1] - evals[i]) < options.degeneracy_tol) flags[i] = flags[i + 1] = true;
  std::vector<CiState> out;
  for (std::size_t i = 0; i < J; ++i) {
    CiState s;
    s.amplitudes = to_std(vecs.col(static_cast<Eigen::Index>(i)).normalized());
    fix_sign(s.amplitudes);
    s.energy = evals[i];
    s.residual_norm = residual_norm(mat, s.amplitudes, s.energy);
    s.degenerate = flags[i];
    out.push_back(std::move(s));
  }
  return out;
}

void check_request(const SparseSymMatrix& mat, std::size_t J) {
  if (J < 1 || J > mat.dimension())
    throw DomainError("requested " + std::to_string(J) + " eigenpairs of a dimension-" +
                      std::to_string(mat.dimension()) + " matrix");
}

}  // namespace

double residual_norm(const SparseSymMatrix& mat, const std::vector<double>& x, double lambda) {
  std::vector<double> y(x.size());
  mat.multiply(x, y);
  double r = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) r += (y[i] - lambda * x[i]) * (y[i] - lambda * x[i]);
  return std::sqrt(r);
}

std::vector<CiState> dense_eigenpairs(const SparseSymMatrix& mat, std::size_t J, const EigenOptions& options) {
  check_request(mat, J);
  const auto n = static_cast<Eigen::Index>(mat.dimension());
  const auto dense = mat.to_dense();
  const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> a(dense.data(), n, n);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw ConvergenceError("dense eigensolver failed", INFINITY);
  // One extra root exposes degeneracy at the edge of the block; the ground level
  // is extended further so the tie-break sees its whole eigenspace.
  Eigen::Index g = std::min<Eigen::Index>(n, static_cast<Eigen::Index>(J) + 1);
  while (g < n && std::abs(es.eigenvalues()[g] - es.eigenvalues()[0]) < options.degeneracy_tol) ++g;
  std::vector<double> evals(es.eigenvalues().data(), es.eigenvalues().data() + g);
  return finish(mat, es.eigenvectors().leftCols(g), std::move(evals), J, options);
}

std::vector<CiState> davidson(const SparseSymMatrix& mat, std::size_t J, double tol, const EigenOptions& options) {
  check_request(mat, J);
  const auto n = static_cast<Eigen::Index>(mat.dimension());
  // One extra root guards against converging onto the wrong member of a near-degenerate pair.
  const auto nroots = static_cast<Eigen::Index>(std::min<std::size_t>(mat.dimension(), J + 1));
  const auto max_sub = std::min<Eigen::Index>(
      n, static_cast<Eigen::Index>(options.max_subspace ? options.max_subspace : std::max<std::size_t>(8 * J, 40)));
  if (max_sub < 2 * nroots && max_sub < n) throw DomainError("Davidson subspace too small for the requested roots");
  const auto diag = mat.diagonal();

  MatrixXd v(n, 0);
  MatrixXd av(n, 0);
  auto add_vector = [&](VectorXd t) {
    for (int pass = 0; pass < 2; ++pass)
      if (v.cols() > 0) t -= v * (v.transpose() * t);
    const double norm = t.norm();
    if (norm < 1e-10) return false;
    t /= norm;
    VectorXd at;
    matvec(mat, t, at);
    v.conservativeResize(Eigen::NoChange, v.cols() + 1);
    av.conservativeResize(Eigen::NoChange, av.cols() + 1);
    v.col(v.cols() - 1) = t;
    av.col(av.cols() - 1) = at;
    return true;
  };

  for (const auto& g : options.guesses) {
    if (static_cast<Eigen::Index>(g.size()) != n) throw DomainError("Davidson guess has the wrong dimension");
    add_vector(Eigen::Map<const VectorXd>(g.data(), n));
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return diag[a] < diag[b]; });
  for (std::size_t k = 0; k < order.size() && v.cols() < std::max<Eigen::Index>(nroots, 2 * static_cast<Eigen::Index>(J)); ++k) {
    VectorXd e = VectorXd::Zero(n);
    e[order[k]] = 1.0;
    add_vector(e);
  }

  double best = INFINITY;
  MatrixXd ritz;
  VectorXd theta;
  for (int it = 0; it < options.max_iterations; ++it) {
    MatrixXd t = v.transpose() * av;
    t = 0.5 * (t + t.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(t);
    const Eigen::Index k = std::min<Eigen::Index>(nroots, v.cols());
    theta = es.eigenvalues().head(k);
    ritz = v * es.eigenvectors().leftCols(k);
    MatrixXd aritz = av * es.eigenvectors().leftCols(k);

    double worst = 0.0;
    std::vector<VectorXd> corrections;
    for (Eigen::Index i = 0; i < k; ++i) {
      VectorXd r = aritz.col(i) - theta[i] * ritz.col(i);
      const double rn = r.norm();
      if (i < static_cast<Eigen::Index>(J)) worst = std::max(worst, rn);
      if (rn <= tol) continue;
      for (Eigen::Index p = 0; p < n; ++p) {
        double d = theta[i] - diag[p];
        if (std::abs(d) < 1e-8) d = d < 0 ? -1e-8 : 1e-8;
        r[p] /= d;
      }
      corrections.push_back(std::move(r));
    }
    best = std::min(best, worst);
    if (worst <= tol && k >= static_cast<Eigen::Index>(J)) {
      std::vector<double> evals(theta.data(), theta.data() + k);
      return finish(mat, ritz, std::move(evals), J, options);
    }
    if (v.cols() + static_cast<Eigen::Index>(corrections.size()) > max_sub) {
      v.resize(n, 0);
      av.resize(n, 0);
      for (Eigen::Index i = 0; i < k; ++i) add_vector(ritz.col(i));
    }
    bool grew = false;
    for (auto& c : corrections) grew = add_vector(std::move(c)) || grew;
    if (!grew) {
      // Stagnation: fall back on the raw residual directions.
      for (Eigen::Index i = 0; i < k; ++i) {
        VectorXd r = aritz.col(i) - theta[i] * ritz.col(i);
        grew = add_vector(r) || grew;
      }
      if (!grew) break;
    }
  }
  throw ConvergenceError("Davidson did not converge; best residual " + std::to_string(best), best);
}

std::vector<CiState> lowest_eigenpairs(const SparseSymMatrix& mat, std::size_t J, double tol,
                                       const EigenOptions& options) {
  if (!(tol > 0)) throw DomainError("solver tolerance must be positive");
  return mat.dimension() <= options.dense_threshold ? dense_eigenpairs(mat, J, options)
                                                     : davidson(mat, J, tol, options);
}

double overlap(const CiState& a, const CiBasis& basis_a, const CiState& b, const CiBasis& basis_b) {
  if (!(basis_a.sector() == basis_b.sector())) throw DomainError("overlap between different sectors");
  if (a.amplitudes.size() != basis_a.size() || b.amplitudes.size() != basis_b.size())
    throw DomainError("state and basis sizes differ");
  double s = 0.0;
  for (std::size_t i = 0; i < basis_a.size(); ++i)
    if (auto j = basis_b.find(basis_a[i])) s += a.amplitudes[i] * b.amplitudes[*j];
  return std::min(1.0, std::abs(s));
}

std::vector<double> embed(const CiState& state, const CiBasis& from, const CiBasis& to) {
  if (!(from.sector() == to.sector())) throw DomainError("cannot embed a state into another sector");
  std::vector<double> out(to.size(), 0.0);
  for (std::size_t i = 0; i < from.size(); ++i)
    if (auto j = to.find(from[i])) out[*j] = state.amplitudes[i];
  return out;
}

void write_state(const CiState& state, const CiBasis& basis, std::ostream& out) {
  char buf[96];
  for (std::size_t i = 0; i < basis.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%llx %llx %.17g\n", static_cast<unsigned long long>(basis[i].alpha),
                  static_cast<unsigned long long>(basis[i].beta), state.amplitudes[i]);
    out << buf;
  }
  if (!out) throw IoError("failed to write state vector");
}

void write_state(const CiState& state, const CiBasis& basis, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot open " + path + " for writing");
  write_state(state, basis, f);
}

StateVector read_state(std::istream& in, const Sector& sector) {
  std::vector<std::pair<Determinant, double>> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string a, b;
    double amp = 0.0;
    if (!(ls >> a)) continue;
    if (a[0] == '#') continue;
    if (!(ls >> b >> amp)) throw ParseError("expected 'alpha_hex beta_hex amplitude'", lineno);
    Determinant d;
    try {
      d.alpha = std::stoull(a, nullptr, 16);
      d.beta = std::stoull(b, nullptr, 16);
    } catch (const std::exception&) {
      throw ParseError("malformed determinant mask", lineno);
    }
    if (!sector.contains(d)) throw DomainError("line " + std::to_string(lineno) + ": determinant outside the sector");
    entries.emplace_back(d, amp);
  }
  if (entries.empty()) throw ParseError("state file holds no amplitudes", lineno);
  std::vector<Determinant> dets;
  for (const auto& e : entries) dets.push_back(e.first);
  StateVector sv{CiBasis(sector, dets), {}};
  if (sv.basis.size() != entries.size()) throw ParseError("duplicate determinant in state file", lineno);
  sv.state.amplitudes.assign(sv.basis.size(), 0.0);
  double norm = 0.0;
  for (const auto& [d, amp] : entries) {
    sv.state.amplitudes[*sv.basis.find(d)] = amp;
    norm += amp * amp;
  }
  norm = std::sqrt(norm);
  if (norm == 0.0) throw DomainError("state vector has zero norm");
  if (std::abs(norm - 1.0) > 1e-6) std::cerr << "warning: state norm " << norm << " renormalized to 1\n";
  for (double& x : sv.state.amplitudes) x /= norm;
  return sv;
}

StateVector read_state(const std::string& path, const Sector& sector) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open " + path);
  return read_state(f, sector);
}

}  // namespace squish
