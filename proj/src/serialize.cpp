#include "epinet/serialize.hpp"

#include <cstdint>
#include <cstdio>

#include "epinet/errors.hpp"

namespace epinet {

using nlohmann::json;

namespace {

json ids_to_json(const std::set<AgentId>& ids) {
  json out = json::array();
  for (const AgentId& a : ids) out.push_back(a.value);
  return out;
}

json ids_to_json(const std::vector<AgentId>& ids) {
  json out = json::array();
  for (const AgentId& a : ids) out.push_back(a.value);
  return out;
}

std::set<AgentId> agent_set_from_json(const json& j) {
  std::set<AgentId> out;
  for (const auto& v : j) out.insert(AgentId{v.get<std::string>()});
  return out;
}

std::vector<AgentId> agent_vec_from_json(const json& j) {
  std::vector<AgentId> out;
  for (const auto& v : j) out.push_back(AgentId{v.get<std::string>()});
  return out;
}

const char* trust_component_key(int i) {
  switch (i) {
    case 0: return "integrity_weak";
    case 1: return "integrity_strong";
    default: return "competence";
  }
}

}  // namespace

json formula_to_json(const Formula& f) {
  switch (f.op()) {
    case Formula::Op::Atom:
      return {{"op", "atom"}, {"prop", f.prop().value}};
    case Formula::Op::Knows:
      return {{"op", "K"}, {"agent", f.agent().value}, {"inner", formula_to_json(f.inner())}};
    case Formula::Op::Believes:
      return {{"op", "B"}, {"agent", f.agent().value}, {"inner", formula_to_json(f.inner())}};
    case Formula::Op::Not:
      return {{"op", "not"}, {"inner", formula_to_json(f.inner())}};
    case Formula::Op::WouldKnow:
      return {{"op", "wkit"}, {"agent", f.agent().value}, {"prop", f.prop().value}};
  }
  throw EpinetError(ErrorCode::InvalidFormula, "unserializable formula node");
}

Formula formula_from_json(const json& j) {
  if (!j.is_object() || !j.contains("op"))
    throw EpinetError(ErrorCode::ParseError, "formula object requires an 'op' key");
  std::string op = j.at("op").get<std::string>();
  if (op == "atom") return Formula::atom(PropId{j.at("prop").get<std::string>()});
  if (op == "K")
    return Formula::knows(AgentId{j.at("agent").get<std::string>()},
                          formula_from_json(j.at("inner")));
  if (op == "B")
    return Formula::believes(AgentId{j.at("agent").get<std::string>()},
                             formula_from_json(j.at("inner")));
  if (op == "not") return Formula::negation(formula_from_json(j.at("inner")));
  if (op == "wkit")
    return Formula::would_know(AgentId{j.at("agent").get<std::string>()},
                               PropId{j.at("prop").get<std::string>()});
  throw EpinetError(ErrorCode::ParseError, "unknown formula op '" + op + "'");
}

struct SnapshotAccess {
  static json to_json(const Epinet& net) {
    json j;
    j["config"] = {{"max_depth", net.config_.max_depth},
                   {"factivity", net.config_.factivity_enforced}};
    j["event_seq"] = net.event_seq_;

    json agents = json::array();
    for (const auto& [id, a] : net.agents_)
      agents.push_back({{"id", id.value}, {"name", a.display_name}});
    j["agents"] = agents;

    json props = json::array();
    for (const auto& [id, p] : net.props_)
      props.push_back({{"id", id.value}, {"statement", p.statement}});
    j["props"] = props;

    json world = json::array();
    for (const auto& p : net.world_) world.push_back(p.value);
    j["world"] = world;

    json facts = json::array();
    for (const Formula& f : net.facts_) facts.push_back(formula_to_json(f));
    j["facts"] = facts;

    json ck = json::array();
    for (const CkRecord& r : net.group_ck_)
      ck.push_back({{"group", ids_to_json(r.group)}, {"prop", r.prop.value}});
    j["group_ck"] = ck;

    json prov = json::array();
    for (const auto& [key, chain] : net.provenance_) {
      json hops = json::array();
      for (const ProvenanceHop& h : chain.hops)
        hops.push_back({{"sender", h.sender.value},
                        {"event", h.event_id},
                        {"trusted", h.trusted_at_delivery}});
      prov.push_back({{"agent", key.first.value},
                      {"prop", key.second.value},
                      {"stale", chain.stale},
                      {"hops", hops}});
    }
    j["provenance"] = prov;

    json trust = json::array();
    for (const auto& [key, cell] : net.trust_) {
      if (cell.empty()) continue;
      json e = {{"from", key.first.value}, {"to", key.second.value}};
      const std::optional<TrustOrigin>* comps[3] = {&cell.integrity_weak, &cell.integrity_strong,
                                                    &cell.competence};
      for (int i = 0; i < 3; ++i)
        if (comps[i]->has_value())
          e[trust_component_key(i)] = (**comps[i] == TrustOrigin::Declared) ? "declared" : "derived";
      trust.push_back(e);
    }
    j["trust"] = trust;

    json cliques = json::object();
    for (const auto& [p, members] : net.clique_props_) cliques[p.value] = ids_to_json(members);
    j["clique_props"] = cliques;

    json conduits = json::object();
    for (const auto& [p, path] : net.conduit_props_) conduits[p.value] = ids_to_json(path);
    j["conduit_props"] = conduits;

    json channels = json::array();
    for (const auto& [id, ch] : net.channels_)
      channels.push_back({{"id", id},
                          {"members", ids_to_json(ch.members)},
                          {"covert", ch.covert},
                          {"host", ids_to_json(ch.host_group)}});
    j["channels"] = channels;

    json threads = json::array();
    for (const auto& [id, th] : net.threads_) {
      json pub = json::array();
      for (const Formula& f : th.public_facts) pub.push_back(formula_to_json(f));
      threads.push_back({{"id", id},
                         {"payload", th.payload.value},
                         {"participants", ids_to_json(th.participants)},
                         {"last_sender", th.last_sender.value},
                         {"last_recipients", ids_to_json(th.last_recipients)},
                         {"public_facts", pub}});
    }
    j["threads"] = threads;

    json petitions = json::array();
    for (const auto& [motion, pet] : net.petitions_)
      petitions.push_back({{"prop", motion.value}, {"participants", ids_to_json(pet.participants)}});
    j["petitions"] = petitions;

    return j;
  }

  static Epinet from_json(const json& j) {
    Config cfg;
    if (j.contains("config")) {
      cfg.max_depth = j.at("config").value("max_depth", 12);
      cfg.factivity_enforced = j.at("config").value("factivity", true);
    }
    Epinet net(cfg);
    net.event_seq_ = j.value("event_seq", std::uint64_t{0});

    for (const auto& a : j.value("agents", json::array())) {
      AgentId id{a.at("id").get<std::string>()};
      net.agents_.emplace(id, Agent{id, a.at("name").get<std::string>()});
    }
    for (const auto& p : j.value("props", json::array())) {
      PropId id{p.at("id").get<std::string>()};
      net.props_.emplace(id, Prop{id, p.at("statement").get<std::string>()});
    }
    for (const auto& p : j.value("world", json::array()))
      net.world_.insert(PropId{p.get<std::string>()});
    for (const auto& f : j.value("facts", json::array()))
      net.facts_.insert(formula_from_json(f));
    for (const auto& r : j.value("group_ck", json::array()))
      net.group_ck_.insert(
          CkRecord{agent_set_from_json(r.at("group")), PropId{r.at("prop").get<std::string>()}});
    for (const auto& e : j.value("provenance", json::array())) {
      ProvenanceChain chain;
      chain.stale = e.value("stale", false);
      for (const auto& h : e.value("hops", json::array()))
        chain.hops.push_back(ProvenanceHop{AgentId{h.at("sender").get<std::string>()},
                                           h.at("event").get<std::string>(),
                                           h.at("trusted").get<bool>()});
      net.provenance_[{AgentId{e.at("agent").get<std::string>()},
                       PropId{e.at("prop").get<std::string>()}}] = std::move(chain);
    }
    for (const auto& e : j.value("trust", json::array())) {
      TrustCell cell;
      std::optional<TrustOrigin>* comps[3] = {&cell.integrity_weak, &cell.integrity_strong,
                                              &cell.competence};
      for (int i = 0; i < 3; ++i) {
        const char* key = trust_component_key(i);
        if (e.contains(key))
          *comps[i] = e.at(key).get<std::string>() == "declared" ? TrustOrigin::Declared
                                                                 : TrustOrigin::Derived;
      }
      net.trust_[{AgentId{e.at("from").get<std::string>()},
                  AgentId{e.at("to").get<std::string>()}}] = cell;
    }
    for (const auto& [key, members] : j.value("clique_props", json::object()).items())
      net.clique_props_[PropId{key}] = agent_set_from_json(members);
    for (const auto& [key, path] : j.value("conduit_props", json::object()).items())
      net.conduit_props_[PropId{key}] = agent_vec_from_json(path);
    for (const auto& c : j.value("channels", json::array())) {
      Channel ch;
      ch.id = c.at("id").get<std::string>();
      ch.members = agent_set_from_json(c.at("members"));
      ch.covert = c.at("covert").get<bool>();
      ch.host_group = agent_set_from_json(c.at("host"));
      net.channels_.emplace(ch.id, std::move(ch));
    }
    for (const auto& t : j.value("threads", json::array())) {
      ThreadState th;
      th.id = t.at("id").get<std::string>();
      th.payload = PropId{t.at("payload").get<std::string>()};
      th.participants = agent_set_from_json(t.at("participants"));
      th.last_sender = AgentId{t.at("last_sender").get<std::string>()};
      th.last_recipients = agent_set_from_json(t.at("last_recipients"));
      for (const auto& f : t.value("public_facts", json::array()))
        th.public_facts.push_back(formula_from_json(f));
      net.threads_.emplace(th.id, std::move(th));
    }
    for (const auto& p : j.value("petitions", json::array())) {
      Petition pet;
      pet.motion = PropId{p.at("prop").get<std::string>()};
      pet.participants = agent_vec_from_json(p.at("participants"));
      net.petitions_.emplace(pet.motion, std::move(pet));
    }

    net.validate_store();
    return net;
  }
};

json snapshot_json(const Epinet& net) { return SnapshotAccess::to_json(net); }

std::string snapshot(const Epinet& net) { return SnapshotAccess::to_json(net).dump(2) + "\n"; }

Epinet load_json(const json& j) {
  try {
    return SnapshotAccess::from_json(j);
  } catch (const EpinetError&) {
    throw;
  } catch (const json::exception& e) {
    throw EpinetError(ErrorCode::ParseError, std::string("snapshot: ") + e.what());
  }
}

Epinet load(const std::string& bytes) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw EpinetError(ErrorCode::ParseError,
                      "snapshot: " + std::string(e.what()) + " (byte " + std::to_string(e.byte) + ")");
  }
  return load_json(j);
}

std::string digest(const Epinet& net) {
  std::string bytes = snapshot(net);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

}  // namespace epinet
