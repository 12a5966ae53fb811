#include "squish/ranking.hpp"

#include <algorithm>
#include <cmath>

#include "squish/error.hpp"

namespace squish {

namespace {

void sort_ranked(RankedList& list) {
  std::sort(list.begin(), list.end(), [](const RankedEntry& a, const RankedEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.key < b.key;
  });
}

double coefficient(const IntegralTable& table, const TermKey& k) {
  const auto& i = k.idx;
  return k.kind == TermKind::one_body ? table.one_body(i[0], i[1]) : table.two_body(i[0], i[1], i[2], i[3]);
}

}  // namespace

RankedList rank_energetic(const std::vector<TermContribution>& contributions) {
  RankedList out;
  out.reserve(contributions.size());
  for (const auto& c : contributions) out.push_back({c.key, std::abs(c.epsilon)});
  sort_ranked(out);
  return out;
}

RankedList rank_coefficient(const IntegralTable& table, const TermSet& pool) {
  RankedList out;
  for (const TermKey& key : pool.included_classes()) {
    double best = 0.0;
    for (const TermKey& k : class_members(key, pool.grouping())) best = std::max(best, std::abs(coefficient(table, k)));
    out.push_back({key, best});
  }
  sort_ranked(out);
  return out;
}

std::vector<TermKey> take_top(const RankedList& ranked, std::size_t m) {
  if (m < 1) throw DomainError("take_top needs m >= 1");
  std::vector<TermKey> out;
  const std::size_t n = std::min(m, ranked.size());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(ranked[i].key);
  return out;
}

}  // namespace squish
