#pragma once

#include "squish/fcidump.hpp"

namespace squish {

struct BudgetQuery {
  int eta = 2;
  int n_spin_orbitals = 2;
  double epsilon = 0.01;
};

// Fixed-particle-number fermionic shadows sample count for all 2-RDM entries:
// C(eta,2) (1 - (eta-2)/N)^2 (N+1)/(N-1) / eps^2.
double measurement_budget(const BudgetQuery& q);

struct BudgetReport {
  BudgetQuery query;
  double budget = 0.0;
  double observables = 0.0;  // N^4 spin-orbital 2-RDM entries
};

// N = 2 * NORB, eta = NELEC.
BudgetReport budget_report(const FcidumpHeader& header, double epsilon);

}  // namespace squish
