#pragma once

#include <cstddef>
#include <vector>

#include "squish/fcidump.hpp"
#include "squish/hamiltonian.hpp"
#include "squish/rdm.hpp"

namespace squish {

struct RankedEntry {
  TermKey key;   // canonical class key
  double score;  // >= 0
};

// Scores nonincreasing; equal scores ordered by ascending canonical key.
using RankedList = std::vector<RankedEntry>;

RankedList rank_energetic(const std::vector<TermContribution>& contributions);
// Score of a class = largest |coefficient| among its members.
RankedList rank_coefficient(const IntegralTable& table, const TermSet& pool);

// First min(m, size) class keys.
std::vector<TermKey> take_top(const RankedList& ranked, std::size_t m);

}  // namespace squish
