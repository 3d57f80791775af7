// Test-only oracles: independent brute-force implementations used to freeze
// expected values and to cross-check the engine on random instances. Nothing
// here may call the code path it is checking.
#ifndef EPINET_TESTS_ORACLES_HPP
#define EPINET_TESTS_ORACLES_HPP

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "epinet/epinet.hpp"
#include "epinet/formula.hpp"

namespace oracles {

using epinet::AgentId;
using epinet::Epinet;
using epinet::Formula;
using epinet::PropId;

// Direct enumeration of every alternating chain of depth exactly d, no
// shortcuts.
inline bool all_chains_hold(const Epinet& net, const std::vector<AgentId>& group, const PropId& p,
                            int d) {
  std::vector<AgentId> chain;
  auto rec = [&](auto&& self, int remaining) -> bool {
    if (remaining == 0) return net.holds(epinet::knows_chain(chain, p));
    for (const AgentId& a : group) {
      if (!chain.empty() && chain.back() == a) continue;
      chain.push_back(a);
      bool ok = self(self, remaining - 1);
      chain.pop_back();
      if (!ok) return false;
    }
    return true;
  };
  return rec(rec, d);
}

// Level by exhaustive chain checking up to cap; -1 encodes infinity.
inline int commonality(const Epinet& net, const std::set<AgentId>& group, const PropId& p,
                       int cap) {
  if (net.ck_covers(group, p)) return -1;
  std::vector<AgentId> members(group.begin(), group.end());
  int level = 0;
  while (level < cap && all_chains_hold(net, members, p, level + 1)) ++level;
  return level;
}

inline std::vector<std::set<AgentId>> all_subsets(const std::vector<AgentId>& agents,
                                                  size_t min_size) {
  std::vector<std::set<AgentId>> out;
  size_t n = agents.size();
  for (size_t mask = 1; mask < (size_t{1} << n); ++mask) {
    std::set<AgentId> s;
    for (size_t i = 0; i < n; ++i)
      if (mask & (size_t{1} << i)) s.insert(agents[i]);
    if (s.size() >= min_size) out.push_back(std::move(s));
  }
  return out;
}

// Maximal member sets by checking every subset directly.
inline std::vector<std::set<AgentId>> neighborhoods_brute(
    const Epinet& net, const PropId& p, const std::function<bool(const std::set<AgentId>&)>& ok,
    size_t min_size) {
  std::vector<AgentId> agents;
  for (const auto& [id, a] : net.agents()) agents.push_back(id);
  std::vector<std::set<AgentId>> qualifying;
  for (auto& s : all_subsets(agents, min_size))
    if (ok(s)) qualifying.push_back(std::move(s));
  std::vector<std::set<AgentId>> maximal;
  for (const auto& s : qualifying) {
    bool dominated = false;
    for (const auto& t : qualifying)
      if (s.size() < t.size() && std::includes(t.begin(), t.end(), s.begin(), s.end())) {
        dominated = true;
        break;
      }
    if (!dominated) maximal.push_back(s);
  }
  std::sort(maximal.begin(), maximal.end());
  return maximal;
}

// Floyd-Warshall reachability over an explicit edge set.
inline std::set<std::pair<int, int>> reachability_closure(int n,
                                                          std::set<std::pair<int, int>> edges) {
  std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
  for (auto& [a, b] : edges) r[a][b] = true;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (r[i][k] && r[k][j]) r[i][j] = true;
  std::set<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && r[i][j]) out.insert({i, j});
  return out;
}

// All shortest paths via breadth-first enumeration; returns the
// lexicographically smallest or empty when unreachable.
inline std::vector<AgentId> shortest_lex_path(
    const std::vector<AgentId>& agents, const AgentId& from, const AgentId& to,
    const std::function<bool(const AgentId&, const AgentId&)>& hop_ok) {
  std::vector<std::vector<AgentId>> frontier{{from}};
  std::set<AgentId> seen{from};
  while (!frontier.empty()) {
    std::vector<std::vector<AgentId>> hits;
    for (const auto& path : frontier)
      if (path.back() == to) hits.push_back(path);
    if (!hits.empty()) return *std::min_element(hits.begin(), hits.end());
    std::set<AgentId> next_seen = seen;
    std::vector<std::vector<AgentId>> next;
    for (const auto& path : frontier)
      for (const AgentId& a : agents) {
        if (seen.count(a) || !hop_ok(path.back(), a)) continue;
        next_seen.insert(a);
        auto grown = path;
        grown.push_back(a);
        next.push_back(std::move(grown));
      }
    // Keep every path of this length; dedup by endpoint happens next round.
    std::set<AgentId> reached;
    for (const auto& path : next) reached.insert(path.back());
    seen.insert(reached.begin(), reached.end());
    frontier = std::move(next);
  }
  return {};
}

struct Gen {
  std::mt19937_64 rng;

  explicit Gen(std::uint64_t seed) : rng(seed) {}

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }

  template <typename T>
  const T& choose(const std::vector<T>& items) {
    return items[static_cast<size_t>(pick(0, static_cast<int>(items.size()) - 1))];
  }

  // A random negation-normal formula over the given ids.
  Formula formula(const std::vector<AgentId>& agents, const std::vector<PropId>& props,
                  int max_depth) {
    Formula f = Formula::atom(choose(props));
    int depth = pick(1, max_depth);
    for (int i = 0; i < depth; ++i) {
      if (i + 1 == depth && chance(0.15)) f = Formula::negation(f);
      f = chance(0.8) ? Formula::knows(choose(agents), std::move(f))
                      : Formula::believes(choose(agents), std::move(f));
    }
    return f;
  }
};

}  // namespace oracles

#endif
