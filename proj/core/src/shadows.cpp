#include "squish/shadows.hpp"

#include <cmath>

#include "squish/error.hpp"

namespace squish {

double measurement_budget(const BudgetQuery& q) {
  if (q.eta < 2) throw DomainError("shadows budget needs at least two electrons");
  if (q.n_spin_orbitals < 2) throw DomainError("shadows budget needs at least two spin orbitals");
  if (q.eta > q.n_spin_orbitals) throw DomainError("more electrons than spin orbitals");
  if (!(q.epsilon > 0) || !std::isfinite(q.epsilon)) throw DomainError("epsilon must be positive and finite");
  // Integer numerator and denominator keep the rational part exact; 1/eps is
  // applied as a single rounded factor so that halving eps scales by exactly 4.
  const double eta = q.eta, n = q.n_spin_orbitals;
  const double pairs = eta * (eta - 1) / 2;
  const double num = pairs * (n - eta + 2) * (n - eta + 2) * (n + 1);
  const double den = n * n * (n - 1);
  const double inv = 1.0 / q.epsilon;
  return num * inv * inv / den;
}

BudgetReport budget_report(const FcidumpHeader& header, double epsilon) {
  BudgetReport r;
  r.query = {header.nelec, 2 * header.norb, epsilon};
  r.budget = measurement_budget(r.query);
  const double n = r.query.n_spin_orbitals;
  r.observables = n * n * n * n;
  return r;
}

}  // namespace squish
