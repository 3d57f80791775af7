#include "epinet/epinet.hpp"

#include <algorithm>

#include "epinet/errors.hpp"

namespace epinet {

namespace {

void collect_refs(const Formula& f, std::vector<AgentId>& agents, std::vector<PropId>& props) {
  switch (f.op()) {
    case Formula::Op::Atom:
      props.push_back(f.prop());
      return;
    case Formula::Op::WouldKnow:
      agents.push_back(f.agent());
      props.push_back(f.prop());
      return;
    case Formula::Op::Not:
      collect_refs(f.inner(), agents, props);
      return;
    case Formula::Op::Knows:
    case Formula::Op::Believes:
      agents.push_back(f.agent());
      collect_refs(f.inner(), agents, props);
      return;
  }
}

std::string join_texts(const std::vector<std::string>& parts) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += ", ";
    out += parts[i];
  }
  return out;
}

}  // namespace

std::vector<std::string> StateLabels::to_strings() const {
  std::vector<std::string> out;
  if (oblivious) return {"oblivious"};
  if (ignorant) return {"ignorant"};
  if (knows) out.push_back("knows");
  if (aware_level >= 2) out.push_back("aware_" + std::to_string(aware_level));
  if (believes) out.push_back("believes");
  if (confident) out.push_back("confident");
  return out;
}

void Epinet::set_config(const Config& config) {
  Epinet trial = *this;
  trial.config_ = config;
  trial.validate_store();
  config_ = config;
}

AgentId Epinet::add_agent(const std::string& display_name) {
  if (display_name.empty()) throw EpinetError(ErrorCode::InvalidName, "agent name must be non-empty");
  std::string id = display_name;
  for (int n = 2; agents_.count(AgentId{id}) > 0; ++n) id = display_name + "#" + std::to_string(n);
  AgentId out{id};
  agents_.emplace(out, Agent{out, display_name});
  return out;
}

PropId Epinet::add_prop(const std::string& name, const std::string& statement) {
  if (name.empty()) throw EpinetError(ErrorCode::InvalidName, "proposition name must be non-empty");
  std::string id = name;
  for (int n = 2; props_.count(PropId{id}) > 0; ++n) id = name + "#" + std::to_string(n);
  PropId out{id};
  props_.emplace(out, Prop{out, statement});
  return out;
}

PropId Epinet::ensure_prop(const std::string& id, const std::string& statement) {
  if (id.empty()) throw EpinetError(ErrorCode::InvalidName, "proposition id must be non-empty");
  PropId out{id};
  if (!has_prop(out)) props_.emplace(out, Prop{out, statement});
  return out;
}

const Agent& Epinet::agent(const AgentId& a) const {
  auto it = agents_.find(a);
  if (it == agents_.end()) throw EpinetError(ErrorCode::UnknownAgent, a.value);
  return it->second;
}

const Prop& Epinet::prop(const PropId& p) const {
  auto it = props_.find(p);
  if (it == props_.end()) throw EpinetError(ErrorCode::NoSuchProp, p.value);
  return it->second;
}

void Epinet::set_world_truth(const PropId& p, bool value) {
  prop(p);
  Epinet trial = *this;
  if (value)
    trial.world_.insert(p);
  else
    trial.world_.erase(p);
  trial.validate_store();
  if (value)
    world_.insert(p);
  else
    world_.erase(p);
}

void Epinet::check_well_formed(const Formula& f) const {
  if (f.op() == Formula::Op::Not)
    throw EpinetError(ErrorCode::InvalidFormula,
                      "negations hold by absence of a derivation and are not stored");
  if (f.depth() > config_.max_depth)
    throw EpinetError(ErrorCode::DepthExceeded,
                      to_text(f) + " exceeds max_depth " + std::to_string(config_.max_depth));
  std::vector<AgentId> as;
  std::vector<PropId> ps;
  collect_refs(f, as, ps);
  for (const auto& a : as)
    if (!has_agent(a)) throw EpinetError(ErrorCode::UnknownAgent, a.value);
  for (const auto& p : ps)
    if (!has_prop(p)) throw EpinetError(ErrorCode::NoSuchProp, p.value);
}

void Epinet::assert_fact(const Formula& f) { assert_facts({f}); }

void Epinet::assert_facts(const std::vector<Formula>& fs) {
  for (const Formula& f : fs) check_well_formed(f);
  Epinet trial = *this;
  for (const Formula& f : fs) trial.facts_.insert(f);
  trial.validate_store();
  for (const Formula& f : fs) facts_.insert(f);
}

void Epinet::retract_fact(const Formula& f) { retract_facts({f}); }

void Epinet::retract_facts(const std::vector<Formula>& fs) {
  for (const Formula& f : fs)
    if (facts_.count(f) == 0) throw EpinetError(ErrorCode::NoSuchFact, to_text(f));
  Epinet trial = *this;
  for (const Formula& f : fs) trial.facts_.erase(f);
  trial.validate_store();
  for (const Formula& f : fs) {
    facts_.erase(f);
    // Received-knowledge bookkeeping goes stale with the fact itself.
    if (f.op() == Formula::Op::Knows && f.inner().op() == Formula::Op::Atom) {
      auto it = provenance_.find({f.agent(), f.inner().prop()});
      if (it != provenance_.end()) it->second.stale = true;
    }
  }
}

bool Epinet::derivable_from_facts(const Formula& f, const Formula* excluded) const {
  for (const Formula& fact : facts_) {
    if (&fact == excluded) continue;
    const Formula* cur = &fact;
    while (true) {
      if (*cur == f) return true;
      if (cur->op() != Formula::Op::Knows) break;
      cur = &cur->inner();
    }
  }
  return false;
}

bool Epinet::ck_entails_chain(const Formula& f) const {
  auto chain = f.as_knows_chain();
  if (!chain) return false;
  const auto& [agents, p] = *chain;
  for (size_t i = 1; i < agents.size(); ++i)
    if (agents[i] == agents[i - 1]) return false;  // introspection is never implied
  for (const CkRecord& r : group_ck_) {
    if (r.prop != p) continue;
    bool covered = true;
    for (const AgentId& a : agents)
      if (r.group.count(a) == 0) {
        covered = false;
        break;
      }
    if (covered) return true;
  }
  return false;
}

bool Epinet::ck_has_prop(const PropId& p) const {
  return std::any_of(group_ck_.begin(), group_ck_.end(),
                     [&](const CkRecord& r) { return r.prop == p; });
}

bool Epinet::holds(const Formula& f) const {
  switch (f.op()) {
    case Formula::Op::Not:
      return !holds(f.inner());
    case Formula::Op::Atom:
      return world_true(f.prop()) || derivable_from_facts(f, nullptr) || ck_has_prop(f.prop());
    case Formula::Op::Knows:
      return derivable_from_facts(f, nullptr) || ck_entails_chain(f);
    case Formula::Op::Believes:
    case Formula::Op::WouldKnow:
      return derivable_from_facts(f, nullptr);
  }
  return false;
}

bool Epinet::agent_mentions_prop(const AgentId& a, const PropId& p) const {
  for (const Formula& f : facts_) {
    if (f.op() == Formula::Op::Atom || f.op() == Formula::Op::Not) continue;
    if (f.agent() == a && f.mentions_prop(p)) return true;
  }
  for (const CkRecord& r : group_ck_)
    if (r.prop == p && r.group.count(a) > 0) return true;
  return false;
}

StateLabels Epinet::epistemic_state(const AgentId& a, const PropId& p) const {
  agent(a);
  prop(p);
  StateLabels out;
  Formula akp = Formula::knows(a, Formula::atom(p));
  out.knows = holds(akp);
  if (!out.knows && !agent_mentions_prop(a, p)) {
    out.oblivious = true;
    return out;
  }
  if (!out.knows && holds(Formula::knows(a, Formula::negation(akp)))) {
    out.ignorant = true;
    return out;
  }
  if (out.knows) {
    Formula chain = akp;
    for (int n = 2; n <= config_.max_depth; ++n) {
      chain = Formula::knows(a, chain);
      if (!holds(chain)) break;
      out.aware_level = n;
    }
  }
  out.believes = !out.knows && holds(Formula::believes(a, Formula::atom(p)));
  out.confident = holds(Formula::knows(a, Formula::would_know(a, p)));
  return out;
}

void Epinet::add_group_ck(const std::set<AgentId>& group, const PropId& p) {
  if (group.size() < 2)
    throw EpinetError(ErrorCode::GroupTooSmall, "common knowledge needs a group of at least 2");
  for (const AgentId& a : group) agent(a);
  prop(p);
  Epinet trial = *this;
  trial.group_ck_.insert(CkRecord{group, p});
  trial.validate_store();
  group_ck_.insert(CkRecord{group, p});
}

void Epinet::extend_group_ck(const PropId& p, const AgentId& joiner) {
  agent(joiner);
  std::vector<CkRecord> updated;
  for (auto it = group_ck_.begin(); it != group_ck_.end();) {
    if (it->prop == p) {
      CkRecord r = *it;
      r.group.insert(joiner);
      updated.push_back(std::move(r));
      it = group_ck_.erase(it);
    } else {
      ++it;
    }
  }
  for (auto& r : updated) group_ck_.insert(std::move(r));
}

bool Epinet::ck_covers(const std::set<AgentId>& group, const PropId& p) const {
  for (const CkRecord& r : group_ck_) {
    if (r.prop != p) continue;
    if (std::includes(r.group.begin(), r.group.end(), group.begin(), group.end())) return true;
  }
  return false;
}

void Epinet::record_delivery(const AgentId& receiver, const PropId& p, ProvenanceChain chain) {
  auto key = std::make_pair(receiver, p);
  auto it = provenance_.find(key);
  if (it == provenance_.end() || it->second.stale)
    provenance_[key] = std::move(chain);  // first live delivery wins
}

const ProvenanceChain* Epinet::provenance(const AgentId& holder, const PropId& p) const {
  auto it = provenance_.find({holder, p});
  return it == provenance_.end() ? nullptr : &it->second;
}

TrustCell& Epinet::trust_cell(const AgentId& from, const AgentId& to) {
  agent(from);
  agent(to);
  return trust_[{from, to}];
}

const TrustCell* Epinet::find_trust(const AgentId& from, const AgentId& to) const {
  auto it = trust_.find({from, to});
  return it == trust_.end() ? nullptr : &it->second;
}

bool Epinet::full_trust(const AgentId& from, const AgentId& to) const {
  const TrustCell* cell = find_trust(from, to);
  return cell && cell->full();
}

PropId Epinet::edge_status_prop(const AgentId& from, const AgentId& to) {
  PropId id = ensure_prop("trust:" + from.value + ">" + to.value + ":strong",
                          agent(from).display_name + " fully trusts " + agent(to).display_name);
  world_.insert(id);
  return id;
}

PropId Epinet::clique_status_prop(const std::set<AgentId>& members) {
  std::string joined;
  for (const AgentId& a : members) {
    if (!joined.empty()) joined += ",";
    joined += a.value;
  }
  PropId id = ensure_prop("trust:clique:" + joined,
                          "members " + joined + " fully trust one another");
  clique_props_[id] = members;
  world_.insert(id);
  return id;
}

PropId Epinet::conduit_status_prop(const std::vector<AgentId>& path) {
  std::string joined;
  for (const AgentId& a : path) {
    if (!joined.empty()) joined += ">";
    joined += a.value;
  }
  PropId id = ensure_prop("conduit:" + joined, "conduit " + joined + " carries trusted assertions");
  conduit_props_[id] = path;
  world_.insert(id);
  return id;
}

void Epinet::add_channel(Channel ch) {
  if (ch.id.empty()) throw EpinetError(ErrorCode::InvalidName, "channel id must be non-empty");
  if (channels_.count(ch.id) > 0)
    throw EpinetError(ErrorCode::InvalidName, "duplicate channel id " + ch.id);
  if (ch.members.empty())
    throw EpinetError(ErrorCode::BadScope, "channel " + ch.id + " has no members");
  for (const AgentId& a : ch.members) agent(a);
  for (const AgentId& a : ch.host_group) agent(a);
  if (!std::includes(ch.host_group.begin(), ch.host_group.end(), ch.members.begin(),
                     ch.members.end()))
    throw EpinetError(ErrorCode::BadScope, "channel members must belong to the host group");
  if (ch.covert && ch.members.size() == ch.host_group.size())
    throw EpinetError(ErrorCode::BadScope,
                      "covert channel must be a strict subset of the host group");
  channels_.emplace(ch.id, std::move(ch));
}

const Channel& Epinet::channel(const std::string& id) const {
  auto it = channels_.find(id);
  if (it == channels_.end()) throw EpinetError(ErrorCode::NoSuchChannel, id);
  return it->second;
}

std::string Epinet::next_event_id() { return "e" + std::to_string(++event_seq_); }

void Epinet::validate_store() const {
  for (const Formula& f : facts_) check_well_formed(f);
  for (const CkRecord& r : group_ck_) {
    if (r.group.size() < 2)
      throw EpinetError(ErrorCode::GroupTooSmall, "common-knowledge record for " + r.prop.value);
    for (const AgentId& a : r.group) agent(a);
    prop(r.prop);
  }
  if (!config_.factivity_enforced) return;

  std::vector<std::string> bad;
  for (const Formula& f : facts_) {
    const Formula* cur = &f;
    while (cur->op() == Formula::Op::Knows) {
      const Formula& s = cur->inner();
      bool ok = true;
      switch (s.op()) {
        case Formula::Op::Atom:
          ok = world_true(s.prop()) || ck_has_prop(s.prop());
          break;
        case Formula::Op::Not:
          ok = !holds(s.inner());
          break;
        case Formula::Op::Knows:
          ok = derivable_from_facts(s, &f) || ck_entails_chain(s);
          break;
        case Formula::Op::Believes:
        case Formula::Op::WouldKnow:
          ok = derivable_from_facts(s, &f);
          break;
      }
      if (!ok) {
        bad.push_back(to_text(f));
        break;
      }
      cur = &s;
    }
  }
  for (const CkRecord& r : group_ck_)
    if (!world_true(r.prop)) bad.push_back("ck(" + r.prop.value + ")");
  if (!bad.empty())
    throw FactivityError("knowledge requires truth; offending: " + join_texts(bad), bad);
}

namespace {

// Retries a mutation after retracting facts the new information falsifies.
// Only pre-existing facts may be dropped; a violation inside the mutation
// itself still throws.
template <typename Fn>
void run_superseding(Epinet& net, Fn&& mutation) {
  for (int rounds = 0; rounds < 64; ++rounds) {
    try {
      mutation();
      return;
    } catch (const FactivityError& e) {
      std::vector<Formula> stale;
      for (const std::string& text : e.offending()) {
        if (text.rfind("ck(", 0) == 0) throw;
        Formula f = parse_formula(text);
        if (net.facts().count(f) == 0) throw;
        stale.push_back(std::move(f));
      }
      if (stale.empty()) throw;
      net.retract_facts(stale);
    }
  }
  throw EpinetError(ErrorCode::FactivityViolation, "superseding retraction did not converge");
}

}  // namespace

void assert_superseding(Epinet& net, const std::vector<Formula>& facts) {
  run_superseding(net, [&] { net.assert_facts(facts); });
}

void add_group_ck_superseding(Epinet& net, const std::set<AgentId>& group, const PropId& p) {
  run_superseding(net, [&] { net.add_group_ck(group, p); });
}

}  // namespace epinet
