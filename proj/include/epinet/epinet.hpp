#ifndef EPINET_EPINET_HPP
#define EPINET_EPINET_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "epinet/formula.hpp"
#include "epinet/ids.hpp"

namespace epinet {

struct Config {
  int max_depth = 12;
  bool factivity_enforced = true;

  bool operator==(const Config&) const = default;
};

// Compact stand-in for the infinite hierarchy: common knowledge of prop
// across group, entailing every finite alternating member chain.
struct CkRecord {
  std::set<AgentId> group;
  PropId prop;

  auto operator<=>(const CkRecord&) const = default;
};

struct ProvenanceHop {
  AgentId sender;
  std::string event_id;
  bool trusted_at_delivery = false;

  bool operator==(const ProvenanceHop&) const = default;
};

struct ProvenanceChain {
  std::vector<ProvenanceHop> hops;  // empty for origin knowledge
  bool stale = false;

  bool operator==(const ProvenanceChain&) const = default;
};

enum class TrustOrigin { Declared, Derived };

// Directed trust components held by one (from, to) pair. A full edge is the
// conjunction of strong integrity and competence; it is never stored
// separately.
struct TrustCell {
  std::optional<TrustOrigin> integrity_weak;
  std::optional<TrustOrigin> integrity_strong;
  std::optional<TrustOrigin> competence;

  bool full() const { return integrity_strong.has_value() && competence.has_value(); }
  bool any_integrity() const { return integrity_weak.has_value() || integrity_strong.has_value(); }
  bool empty() const { return !integrity_weak && !integrity_strong && !competence; }

  bool operator==(const TrustCell&) const = default;
};

struct Channel {
  std::string id;
  std::set<AgentId> members;
  bool covert = false;
  std::set<AgentId> host_group;

  bool operator==(const Channel&) const = default;
};

// One conversation: a payload plus the publicly visible knowledge the
// exchanged messages have produced so far. Hidden-recipient facts never enter
// public_facts.
struct ThreadState {
  std::string id;
  PropId payload;
  std::set<AgentId> participants;
  AgentId last_sender;
  std::set<AgentId> last_recipients;
  std::vector<Formula> public_facts;

  bool operator==(const ThreadState&) const = default;
};

struct Petition {
  PropId motion;
  std::vector<AgentId> participants;  // join order; first entry initiated

  bool operator==(const Petition&) const = default;
};

struct StateLabels {
  bool knows = false;
  int aware_level = 0;  // largest n >= 2 with the full introspection chain, else 0
  bool believes = false;
  bool confident = false;
  bool ignorant = false;
  bool oblivious = false;

  std::vector<std::string> to_strings() const;
  bool operator==(const StateLabels&) const = default;
};

class Epinet {
 public:
  Epinet() = default;
  explicit Epinet(Config config) : config_(config) {}

  const Config& config() const { return config_; }
  // Re-validates the store under the new settings before committing.
  void set_config(const Config& config);

  // --- registries -----------------------------------------------------
  // Register under the given name if free, otherwise suffix (#2, #3, ...).
  AgentId add_agent(const std::string& display_name);
  PropId add_prop(const std::string& name, const std::string& statement);
  // Registers the exact id (canonical propositions); returns the existing
  // entry when already present.
  PropId ensure_prop(const std::string& id, const std::string& statement);
  bool has_agent(const AgentId& a) const { return agents_.count(a) > 0; }
  bool has_prop(const PropId& p) const { return props_.count(p) > 0; }
  const Agent& agent(const AgentId& a) const;
  const Prop& prop(const PropId& p) const;
  const std::map<AgentId, Agent>& agents() const { return agents_; }
  const std::map<PropId, Prop>& props() const { return props_; }

  // --- world truth ----------------------------------------------------
  void set_world_truth(const PropId& p, bool value);
  bool world_true(const PropId& p) const { return world_.count(p) > 0; }
  const std::set<PropId>& world() const { return world_; }

  // --- fact store -----------------------------------------------------
  void assert_fact(const Formula& f);
  void assert_facts(const std::vector<Formula>& fs);
  void retract_fact(const Formula& f);
  void retract_facts(const std::vector<Formula>& fs);
  const std::set<Formula>& facts() const { return facts_; }

  // Derivability: stored, a Knows-stripped suffix of a stored fact, entailed
  // by a common-knowledge record, or (atoms) true in the world. Negation is
  // always computed as absence of a derivation, never looked up.
  bool holds(const Formula& f) const;

  StateLabels epistemic_state(const AgentId& a, const PropId& p) const;

  // --- common knowledge records ----------------------------------------
  void add_group_ck(const std::set<AgentId>& group, const PropId& p);
  void extend_group_ck(const PropId& p, const AgentId& joiner);
  const std::set<CkRecord>& group_ck() const { return group_ck_; }
  bool ck_covers(const std::set<AgentId>& group, const PropId& p) const;

  // --- provenance -------------------------------------------------------
  void record_delivery(const AgentId& receiver, const PropId& p, ProvenanceChain chain);
  const ProvenanceChain* provenance(const AgentId& holder, const PropId& p) const;
  const std::map<std::pair<AgentId, PropId>, ProvenanceChain>& provenance_ledger() const {
    return provenance_;
  }

  // --- trust cells (managed by the trust operations) ---------------------
  TrustCell& trust_cell(const AgentId& from, const AgentId& to);
  const TrustCell* find_trust(const AgentId& from, const AgentId& to) const;
  const std::map<std::pair<AgentId, AgentId>, TrustCell>& trust_edges() const { return trust_; }
  bool full_trust(const AgentId& from, const AgentId& to) const;

  // Canonical proposition registries used by trust derivations; entries are
  // created on first use and set true in the world.
  PropId edge_status_prop(const AgentId& from, const AgentId& to);
  PropId clique_status_prop(const std::set<AgentId>& members);
  PropId conduit_status_prop(const std::vector<AgentId>& path);
  const std::map<PropId, std::set<AgentId>>& clique_props() const { return clique_props_; }
  const std::map<PropId, std::vector<AgentId>>& conduit_props() const { return conduit_props_; }

  // --- platform registries ------------------------------------------------
  void add_channel(Channel ch);
  const Channel& channel(const std::string& id) const;
  bool has_channel(const std::string& id) const { return channels_.count(id) > 0; }
  const std::map<std::string, Channel>& channels() const { return channels_; }

  std::map<std::string, ThreadState>& threads() { return threads_; }
  const std::map<std::string, ThreadState>& threads() const { return threads_; }

  std::map<PropId, Petition>& petitions() { return petitions_; }
  const std::map<PropId, Petition>& petitions() const { return petitions_; }

  std::string next_event_id();
  std::uint64_t event_seq() const { return event_seq_; }

  // Structural whole-state comparison (round-trip checks).
  bool operator==(const Epinet&) const = default;

  // Re-checks every stored fact and record; throws FactivityError on the
  // first inconsistent batch. Public so loaders can validate reconstituted
  // state with the same rules as live mutation.
  void validate_store() const;

  friend struct SnapshotAccess;

 private:
  void check_well_formed(const Formula& f) const;
  bool derivable_from_facts(const Formula& f, const Formula* excluded) const;
  bool ck_entails_chain(const Formula& f) const;
  bool ck_has_prop(const PropId& p) const;
  bool agent_mentions_prop(const AgentId& a, const PropId& p) const;

  Config config_;
  std::map<AgentId, Agent> agents_;
  std::map<PropId, Prop> props_;
  std::set<PropId> world_;
  std::set<Formula> facts_;
  std::set<CkRecord> group_ck_;
  std::map<std::pair<AgentId, PropId>, ProvenanceChain> provenance_;
  std::map<std::pair<AgentId, AgentId>, TrustCell> trust_;
  std::map<PropId, std::set<AgentId>> clique_props_;
  std::map<PropId, std::vector<AgentId>> conduit_props_;
  std::map<std::string, Channel> channels_;
  std::map<std::string, ThreadState> threads_;
  std::map<PropId, Petition> petitions_;
  std::uint64_t event_seq_ = 0;
};

// Mutations that model incoming information: when the new facts falsify
// stored negative knowledge (someone knew that someone did not know), the
// stale facts are retracted and the mutation retried. Explicit assert_fact
// stays strict; communication events use these.
void assert_superseding(Epinet& net, const std::vector<Formula>& facts);
void add_group_ck_superseding(Epinet& net, const std::set<AgentId>& group, const PropId& p);

}  // namespace epinet

#endif
