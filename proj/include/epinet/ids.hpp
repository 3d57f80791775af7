#ifndef EPINET_IDS_HPP
#define EPINET_IDS_HPP

#include <compare>
#include <string>

namespace epinet {

// Agents and propositions are compared by id only; display text lives in the
// registries on Epinet.
struct AgentId {
  std::string value;

  auto operator<=>(const AgentId&) const = default;
};

struct PropId {
  std::string value;

  auto operator<=>(const PropId&) const = default;
};

struct Agent {
  AgentId id;
  std::string display_name;

  bool operator==(const Agent&) const = default;
};

struct Prop {
  PropId id;
  std::string statement;

  bool operator==(const Prop&) const = default;
};

}  // namespace epinet

#endif
