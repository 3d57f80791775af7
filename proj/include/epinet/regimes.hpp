#ifndef EPINET_REGIMES_HPP
#define EPINET_REGIMES_HPP

#include <map>
#include <set>
#include <vector>

#include "epinet/epinet.hpp"

namespace epinet {

enum class RegimeKind { Distributed, Mutual, LevelN, Common, Covert };

struct Neighborhood {
  std::set<AgentId> members;
  PropId prop;
  RegimeKind kind = RegimeKind::Distributed;
  int n = 0;  // requested level for LevelN

  bool operator==(const Neighborhood&) const = default;
};

struct CommonalityReport {
  std::set<AgentId> group;
  PropId prop;
  int level = 0;
  bool infinite = false;

  bool at_least(int n) const { return infinite || level >= n; }
  bool operator==(const CommonalityReport&) const = default;
};

struct Distribution {
  int count = 0;
  double ratio = 0.0;

  bool operator==(const Distribution&) const = default;
};

// How widely p is known across scope (absolute and relative).
Distribution distribution(const Epinet& net, const PropId& p, const std::set<AgentId>& scope);

// Largest d such that every alternating Knows chain of depth exactly d over
// group members holds for p; infinite when a common-knowledge record covers
// the group. d = 1 means every member knows p.
CommonalityReport commonality_level(const Epinet& net, const std::set<AgentId>& group,
                                    const PropId& p);

// p is fully shared inside sg while everyone in g outside sg is oblivious of it.
bool covert(const Epinet& net, const PropId& p, const std::set<AgentId>& sg,
            const std::set<AgentId>& g);

// All maximal agent sets satisfying the regime for p, sorted by member lists.
// kind must be Distributed, Mutual, LevelN or Common; n applies to LevelN.
std::vector<Neighborhood> find_neighborhoods(const Epinet& net, const PropId& p, RegimeKind kind,
                                             int n = 2);

// Every member knows every other member's conditional-commitment proposition.
bool mobilization_possible(const Epinet& net, const std::set<AgentId>& group,
                           const std::map<AgentId, PropId>& commitments);

}  // namespace epinet

#endif
