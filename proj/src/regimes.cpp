#include "epinet/regimes.hpp"

#include <algorithm>
#include <cmath>

#include "epinet/errors.hpp"

namespace epinet {

namespace {

// True when every alternating chain of depth exactly d over group holds.
// Before enumerating, bounds the number of chains that could possibly hold:
// each non-CK-covered chain needs its own stored fact suffix, so once the
// chain count exceeds what facts plus CK-internal chains can cover, some
// chain must fail.
bool all_chains_hold(const Epinet& net, const std::vector<AgentId>& group, const PropId& p,
                     int d) {
  const double m = static_cast<double>(group.size());
  double needed = m * std::pow(m - 1.0, d - 1);
  double coverable = static_cast<double>(net.facts().size());
  for (const CkRecord& r : net.group_ck()) {
    if (r.prop != p) continue;
    double i = 0;
    for (const AgentId& a : group)
      if (r.group.count(a)) i += 1.0;
    if (i >= 2.0) coverable += i * std::pow(i - 1.0, d - 1);
  }
  if (needed > coverable + 0.5) return false;

  std::vector<AgentId> chain;
  chain.reserve(static_cast<size_t>(d));
  auto rec = [&](auto&& self, int remaining) -> bool {
    if (remaining == 0) return net.holds(knows_chain(chain, p));
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

std::vector<Neighborhood> sorted_hoods(std::vector<std::set<AgentId>> sets, const PropId& p,
                                       RegimeKind kind, int n) {
  std::sort(sets.begin(), sets.end());
  std::vector<Neighborhood> out;
  out.reserve(sets.size());
  for (auto& s : sets) out.push_back(Neighborhood{std::move(s), p, kind, n});
  return out;
}

// Keeps only sets with no strict superset in the family.
std::vector<std::set<AgentId>> maximal_only(const std::set<std::set<AgentId>>& family) {
  std::vector<std::set<AgentId>> out;
  for (const auto& s : family) {
    bool dominated = false;
    for (const auto& t : family) {
      if (s.size() < t.size() &&
          std::includes(t.begin(), t.end(), s.begin(), s.end())) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.push_back(s);
  }
  return out;
}

}  // namespace

Distribution distribution(const Epinet& net, const PropId& p, const std::set<AgentId>& scope) {
  if (scope.empty()) throw EpinetError(ErrorCode::EmptyScope, "distribution over empty scope");
  net.prop(p);
  Distribution out;
  for (const AgentId& a : scope) {
    net.agent(a);
    if (net.holds(Formula::knows(a, Formula::atom(p)))) ++out.count;
  }
  out.ratio = static_cast<double>(out.count) / static_cast<double>(scope.size());
  return out;
}

CommonalityReport commonality_level(const Epinet& net, const std::set<AgentId>& group,
                                    const PropId& p) {
  if (group.size() < 2)
    throw EpinetError(ErrorCode::GroupTooSmall, "commonality needs a group of at least 2");
  for (const AgentId& a : group) net.agent(a);
  net.prop(p);

  CommonalityReport report{group, p, 0, false};
  if (net.ck_covers(group, p)) {
    report.infinite = true;
    return report;
  }
  std::vector<AgentId> members(group.begin(), group.end());
  int cap = net.config().max_depth + 4;
  while (report.level < cap && all_chains_hold(net, members, p, report.level + 1)) ++report.level;
  return report;
}

bool covert(const Epinet& net, const PropId& p, const std::set<AgentId>& sg,
            const std::set<AgentId>& g) {
  if (sg.empty()) throw EpinetError(ErrorCode::BadScope, "covert subnetwork must be non-empty");
  if (!std::includes(g.begin(), g.end(), sg.begin(), sg.end()) || sg.size() == g.size())
    throw EpinetError(ErrorCode::BadScope, "subnetwork must be a strict subset of the network");
  if (distribution(net, p, sg).ratio < 1.0) return false;
  for (const AgentId& outsider : g) {
    if (sg.count(outsider)) continue;
    if (!net.epistemic_state(outsider, p).oblivious) return false;
  }
  return true;
}

std::vector<Neighborhood> find_neighborhoods(const Epinet& net, const PropId& p, RegimeKind kind,
                                             int n) {
  net.prop(p);
  std::set<AgentId> base;
  for (const auto& [id, a] : net.agents())
    if (net.holds(Formula::knows(id, Formula::atom(p)))) base.insert(id);

  if (kind == RegimeKind::Distributed) {
    if (base.empty()) return {};
    return sorted_hoods({base}, p, kind, n);
  }

  if (kind == RegimeKind::Common) {
    std::set<std::set<AgentId>> groups;
    for (const CkRecord& r : net.group_ck())
      if (r.prop == p) groups.insert(r.group);
    return sorted_hoods(maximal_only(groups), p, kind, n);
  }

  if (kind != RegimeKind::Mutual && kind != RegimeKind::LevelN)
    throw EpinetError(ErrorCode::BadScope, "unsupported neighborhood kind");
  int level = kind == RegimeKind::Mutual ? 2 : n;
  if (level < 2)
    throw EpinetError(ErrorCode::BadScope, "level-n neighborhoods require n >= 2");

  auto qualifies = [&](const std::set<AgentId>& s) {
    return commonality_level(net, s, p).at_least(level);
  };

  // Commonality is hereditary downward, so grow qualifying sets level-wise.
  std::set<std::set<AgentId>> family;
  std::set<std::set<AgentId>> current;
  std::vector<AgentId> members(base.begin(), base.end());
  for (size_t i = 0; i < members.size(); ++i)
    for (size_t j = i + 1; j < members.size(); ++j) {
      std::set<AgentId> pair{members[i], members[j]};
      if (qualifies(pair)) current.insert(std::move(pair));
    }
  family = current;
  while (!current.empty()) {
    std::set<std::set<AgentId>> next;
    for (const auto& s : current)
      for (const AgentId& x : base) {
        if (s.count(x)) continue;
        std::set<AgentId> grown = s;
        grown.insert(x);
        if (family.count(grown) || next.count(grown)) continue;
        if (qualifies(grown)) next.insert(std::move(grown));
      }
    for (const auto& s : next) family.insert(s);
    current = std::move(next);
  }
  return sorted_hoods(maximal_only(family), p, kind, level);
}

bool mobilization_possible(const Epinet& net, const std::set<AgentId>& group,
                           const std::map<AgentId, PropId>& commitments) {
  for (const AgentId& a : group) {
    net.agent(a);
    if (commitments.count(a) == 0)
      throw EpinetError(ErrorCode::IncompleteCommitments, "no commitment for " + a.value);
  }
  for (const AgentId& x : group)
    for (const AgentId& y : group) {
      if (x == y) continue;
      if (!net.holds(Formula::knows(x, Formula::atom(commitments.at(y))))) return false;
    }
  return true;
}

}  // namespace epinet
