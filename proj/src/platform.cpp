#include "epinet/platform.hpp"

#include <algorithm>

#include "epinet/errors.hpp"
#include "epinet/trust.hpp"

namespace epinet {

using nlohmann::json;

const char* event_kind_name(EventKind k) {
  switch (k) {
    case EventKind::DirectMessage: return "direct_message";
    case EventKind::AckRead: return "ack_read";
    case EventKind::Broadcast: return "broadcast";
    case EventKind::Reaction: return "reaction";
    case EventKind::CoPresence: return "co_presence";
    case EventKind::ChannelPost: return "channel_post";
    case EventKind::Recording: return "recording";
    case EventKind::ProfileView: return "profile_view";
    case EventKind::PetitionSign: return "petition_sign";
    case EventKind::Leak: return "leak";
  }
  return "?";
}

EventKind event_kind_from_string(const std::string& s) {
  static const std::map<std::string, EventKind> kinds = {
      {"direct_message", EventKind::DirectMessage},
      {"ack_read", EventKind::AckRead},
      {"broadcast", EventKind::Broadcast},
      {"reaction", EventKind::Reaction},
      {"co_presence", EventKind::CoPresence},
      {"channel_post", EventKind::ChannelPost},
      {"recording", EventKind::Recording},
      {"profile_view", EventKind::ProfileView},
      {"petition_sign", EventKind::PetitionSign},
      {"leak", EventKind::Leak},
  };
  auto it = kinds.find(s);
  if (it == kinds.end()) {
    std::string valid;
    for (const auto& [name, _] : kinds) valid += valid.empty() ? name : ", " + name;
    throw EpinetError(ErrorCode::ParseError, "unknown event kind '" + s + "' (expected one of " +
                                                 valid + ")");
  }
  return it->second;
}

namespace {

Formula katom(const AgentId& a, const PropId& p) { return Formula::knows(a, Formula::atom(p)); }
Formula batom(const AgentId& a, const PropId& p) { return Formula::believes(a, Formula::atom(p)); }

// Collects facts for one batch assert, silently dropping formulas deeper
// than max_depth.
struct FactBatch {
  const Epinet& net;
  std::vector<Formula> facts;

  void add(Formula f) {
    if (f.depth() <= net.config().max_depth) facts.push_back(std::move(f));
  }
};

void record_hop(Epinet& net, const AgentId& receiver, const PropId& p, const AgentId& sender,
                const std::string& eid, bool trusted) {
  ProvenanceChain chain;
  if (const ProvenanceChain* prev = net.provenance(sender, p); prev && !prev->stale)
    chain.hops = prev->hops;
  chain.hops.push_back(ProvenanceHop{sender, eid, trusted});
  net.record_delivery(receiver, p, std::move(chain));
}

bool contains(const std::vector<Formula>& fs, const Formula& f) {
  return std::find(fs.begin(), fs.end(), f) != fs.end();
}

// Shared delivery semantics for messages and replies. Hidden recipients see
// everything the visible ones received plus the asymmetry facts; nothing
// about a hidden recipient ever reaches the visible side or the public
// thread record.
void deliver_message(Epinet& net, ThreadState& th, const AgentId& sender,
                     const std::set<AgentId>& visible, const std::set<AgentId>& hidden,
                     const std::string& eid) {
  const PropId p = th.payload;
  const bool truth = net.world_true(p);
  FactBatch batch{net, {}};
  std::vector<Formula> new_public;

  auto publish = [&](const Formula& f) {
    if (f.depth() <= net.config().max_depth && !contains(th.public_facts, f) &&
        !contains(new_public, f))
      new_public.push_back(f);
  };

  if (truth) {
    batch.add(katom(sender, p));
    publish(katom(sender, p));
  } else {
    batch.add(batom(sender, p));
  }

  std::vector<Formula> sender_rooted;
  for (const Formula& f : th.public_facts)
    if (f.op() == Formula::Op::Knows && f.agent() == sender) sender_rooted.push_back(f);
  if (truth && !contains(sender_rooted, katom(sender, p)))
    sender_rooted.insert(sender_rooted.begin(), katom(sender, p));

  for (const AgentId& r : visible) {
    if (truth) {
      batch.add(katom(r, p));
      publish(katom(r, p));
      for (const Formula& f : sender_rooted) {
        batch.add(Formula::knows(r, f));
        publish(Formula::knows(r, f));
      }
    } else {
      batch.add(batom(r, p));
      batch.add(Formula::believes(r, katom(sender, p)));
    }
    batch.add(Formula::believes(sender, katom(r, p)));
  }

  for (const AgentId& h : hidden) {
    if (truth) {
      batch.add(katom(h, p));
      for (const Formula& f : sender_rooted) batch.add(Formula::knows(h, f));
      for (const AgentId& r : visible) {
        batch.add(Formula::knows(h, katom(r, p)));
        Formula unseen = Formula::negation(Formula::knows(r, katom(h, p)));
        batch.add(Formula::knows(sender, unseen));
        batch.add(Formula::knows(h, unseen));
        batch.add(Formula::knows(h, Formula::knows(sender, unseen)));
      }
    } else {
      batch.add(batom(h, p));
      batch.add(Formula::believes(h, katom(sender, p)));
      for (const AgentId& r : visible) batch.add(Formula::believes(h, katom(r, p)));
    }
    batch.add(Formula::believes(sender, katom(h, p)));
  }

  assert_superseding(net, batch.facts);

  for (const AgentId& r : visible) record_hop(net, r, p, sender, eid, net.full_trust(r, sender));
  for (const AgentId& h : hidden) record_hop(net, h, p, sender, eid, net.full_trust(h, sender));

  for (Formula& f : new_public) th.public_facts.push_back(std::move(f));
  th.participants.insert(sender);
  th.participants.insert(visible.begin(), visible.end());
  th.participants.insert(hidden.begin(), hidden.end());
  th.last_sender = sender;
  th.last_recipients.clear();
  th.last_recipients.insert(visible.begin(), visible.end());
  th.last_recipients.insert(hidden.begin(), hidden.end());
}

void apply_direct_message(Epinet& net, const Event& e) {
  std::string tok = e.thread ? *e.thread : "t:" + e.id;
  auto it = net.threads().find(tok);
  if (it == net.threads().end()) {
    ThreadState th;
    th.id = tok;
    th.payload = e.payload;
    it = net.threads().emplace(tok, std::move(th)).first;
  } else {
    if (it->second.payload != e.payload)
      throw EpinetError(ErrorCode::MalformedEvent,
                        "thread " + tok + " carries payload " + it->second.payload.value);
    if (it->second.participants.count(e.sender) == 0)
      throw EpinetError(ErrorCode::NoSuchThread,
                        e.sender.value + " is not a participant of thread " + tok);
  }
  deliver_message(net, it->second, e.sender, e.visible_recipients, e.hidden_recipients, e.id);
}

void apply_ack_read(Epinet& net, const Event& e) {
  if (!e.thread) throw EpinetError(ErrorCode::MalformedEvent, "ack_read requires a thread");
  auto it = net.threads().find(*e.thread);
  if (it == net.threads().end()) throw EpinetError(ErrorCode::NoSuchThread, *e.thread);
  ThreadState& th = it->second;
  const AgentId reader = e.sender;
  const AgentId sender = th.last_sender;
  if (th.last_recipients.count(reader) == 0)
    throw EpinetError(ErrorCode::MalformedEvent,
                      reader.value + " was not a recipient of the last message in " + th.id);
  const PropId p = th.payload;
  if (net.holds(katom(reader, p))) {
    Formula seen = Formula::knows(sender, katom(reader, p));
    FactBatch batch{net, {}};
    batch.add(seen);
    batch.add(Formula::knows(reader, seen));
    assert_superseding(net, batch.facts);
    if (seen.depth() <= net.config().max_depth && !contains(th.public_facts, seen)) {
      th.public_facts.push_back(seen);
      Formula echoed = Formula::knows(reader, seen);
      if (echoed.depth() <= net.config().max_depth) th.public_facts.push_back(echoed);
    }
  } else {
    net.assert_fact(Formula::believes(sender, batom(reader, p)));
  }
}

void apply_broadcast(Epinet& net, const Event& e) {
  const PropId p = e.payload;
  const bool truth = net.world_true(p);
  std::set<AgentId> audience = e.visible_recipients;
  if (audience.empty())
    for (const auto& [id, a] : net.agents())
      if (id != e.sender) audience.insert(id);

  FactBatch batch{net, {}};
  batch.add(truth ? katom(e.sender, p) : batom(e.sender, p));
  for (const AgentId& a : audience) {
    if (truth) {
      batch.add(katom(a, p));
      batch.add(Formula::knows(a, katom(e.sender, p)));
    } else {
      batch.add(batom(a, p));
      batch.add(Formula::believes(a, katom(e.sender, p)));
    }
  }
  assert_superseding(net, batch.facts);
  // The sender learns nothing about who received the broadcast.
  for (const AgentId& a : audience)
    record_hop(net, a, p, e.sender, e.id, net.full_trust(a, e.sender));
}

void apply_reaction(Epinet& net, const Event& e) {
  if (e.visible_recipients.size() != 1)
    throw EpinetError(ErrorCode::MalformedEvent, "reaction targets exactly one author");
  const AgentId author = *e.visible_recipients.begin();
  const AgentId reactor = e.sender;
  const PropId p = e.payload;
  if (!net.holds(katom(reactor, p)))
    throw EpinetError(ErrorCode::MalformedEvent,
                      reactor.value + " cannot react to " + p.value + " without knowing it");
  Formula seen = Formula::knows(author, katom(reactor, p));
  FactBatch batch{net, {}};
  batch.add(seen);
  batch.add(Formula::knows(reactor, seen));
  assert_superseding(net, batch.facts);
}

void apply_co_presence(Epinet& net, const Event& e) {
  std::set<AgentId> attendees = e.visible_recipients;
  attendees.insert(e.sender);
  if (attendees.size() < 2)
    throw EpinetError(ErrorCode::MalformedEvent, "co_presence needs at least two attendees");
  add_group_ck_superseding(net, attendees, e.payload);
  for (const AgentId& a : attendees)
    if (a != e.sender) record_hop(net, a, e.payload, e.sender, e.id, true);
}

void apply_channel_post(Epinet& net, const Event& e) {
  if (!e.thread) throw EpinetError(ErrorCode::NoSuchChannel, "channel_post requires a channel");
  const Channel& ch = net.channel(*e.thread);
  if (ch.members.count(e.sender) == 0)
    throw EpinetError(ErrorCode::MalformedEvent,
                      e.sender.value + " is not a member of channel " + ch.id);
  if (ch.members.size() >= 2)
    add_group_ck_superseding(net, ch.members, e.payload);
  else
    assert_superseding(net, {katom(e.sender, e.payload)});
  for (const AgentId& m : ch.members)
    if (m != e.sender) record_hop(net, m, e.payload, e.sender, e.id, true);
  // Covert or not, non-members receive nothing.
}

void apply_recording(Epinet& net, const Event& e) {
  const std::set<AgentId>& attendees = e.visible_recipients;
  const std::set<AgentId>& viewers = e.hidden_recipients;
  const PropId p = e.payload;
  const bool truth = net.world_true(p);

  if (e.flags.consent) {
    PropId exists = net.ensure_prop("rec:" + e.id, "recording " + e.id + " exists");
    net.set_world_truth(exists, true);
    PropId viewer_set =
        net.ensure_prop("recviewers:" + e.id, "the viewer set of recording " + e.id);
    std::set<AgentId> present = attendees;
    present.insert(e.sender);
    FactBatch batch{net, {}};
    for (const AgentId& a : present) {
      batch.add(katom(a, exists));
      batch.add(Formula::knows(a, Formula::negation(katom(a, viewer_set))));
    }
    assert_superseding(net, batch.facts);
  }
  // Without consent the attendees learn nothing at all.

  FactBatch watched{net, {}};
  for (const AgentId& v : viewers) watched.add(truth ? katom(v, p) : batom(v, p));
  assert_superseding(net, watched.facts);
  for (const AgentId& v : viewers) record_hop(net, v, p, e.sender, e.id, true);
}

void apply_profile_view(Epinet& net, const Event& e) {
  if (e.visible_recipients.size() != 1)
    throw EpinetError(ErrorCode::MalformedEvent, "profile_view targets exactly one owner");
  const AgentId viewer = e.sender;
  const AgentId owner = *e.visible_recipients.begin();
  const PropId p = e.payload;
  const bool truth = net.world_true(p);

  FactBatch batch{net, {}};
  batch.add(truth ? katom(viewer, p) : batom(viewer, p));
  PropId premium{"premium:" + owner.value};
  bool owner_premium = net.has_prop(premium) && net.world_true(premium);
  if (truth && owner_premium) {
    Formula seen = Formula::knows(owner, katom(viewer, p));
    batch.add(seen);
    if (net.holds(katom(viewer, premium))) batch.add(Formula::knows(viewer, seen));
  }
  assert_superseding(net, batch.facts);
  record_hop(net, viewer, p, owner, e.id, true);
}

void apply_petition_sign(Epinet& net, const Event& e) {
  const PropId motion = e.payload;
  const AgentId signer = e.sender;
  Petition& pet = net.petitions()
                      .emplace(motion, Petition{motion, {}})
                      .first->second;
  if (std::find(pet.participants.begin(), pet.participants.end(), signer) ==
      pet.participants.end())
    pet.participants.push_back(signer);

  std::map<AgentId, PropId> support;
  for (const AgentId& w : pet.participants) {
    PropId s = net.ensure_prop("supports:" + w.value + ":" + motion.value,
                               w.value + " supports " + motion.value);
    net.set_world_truth(s, true);
    support.emplace(w, s);
  }

  // Every participant sees the full signature list: pairwise level-2
  // knowledge of every support proposition.
  FactBatch batch{net, {}};
  for (const auto& [w, s] : support)
    for (const AgentId& u : pet.participants) batch.add(katom(u, s));
  for (const auto& [w, s] : support)
    for (const AgentId& u : pet.participants)
      for (const AgentId& v : pet.participants) {
        if (u == v) continue;
        batch.add(Formula::knows(u, katom(v, s)));
      }
  assert_superseding(net, batch.facts);
  for (const auto& [w, s] : support)
    for (const AgentId& u : pet.participants)
      if (u != w) record_hop(net, u, s, w, e.id, true);
}

void apply_leak(Epinet& net, const Event& e) {
  if (e.visible_recipients.size() != 1)
    throw EpinetError(ErrorCode::MalformedEvent, "leak targets exactly one outsider");
  if (!e.thread) throw EpinetError(ErrorCode::NoSuchChannel, "leak requires a channel");
  const Channel& ch = net.channel(*e.thread);
  record_breach(net, e.sender, *e.visible_recipients.begin(), e.payload, ch.members);
}

}  // namespace

Event apply_event(Epinet& net, Event e) {
  net.agent(e.sender);
  for (const AgentId& a : e.visible_recipients) net.agent(a);
  for (const AgentId& a : e.hidden_recipients) net.agent(a);
  if (!e.payload.value.empty()) net.prop(e.payload);
  if (e.visible_recipients.count(e.sender) || e.hidden_recipients.count(e.sender))
    throw EpinetError(ErrorCode::MalformedEvent, "sender cannot be a recipient");
  for (const AgentId& a : e.visible_recipients)
    if (e.hidden_recipients.count(a))
      throw EpinetError(ErrorCode::MalformedEvent,
                        a.value + " is both a visible and a hidden recipient");
  if (e.id.empty()) e.id = net.next_event_id();

  switch (e.kind) {
    case EventKind::DirectMessage: apply_direct_message(net, e); break;
    case EventKind::AckRead: e.flags.acknowledged = true; apply_ack_read(net, e); break;
    case EventKind::Broadcast: apply_broadcast(net, e); break;
    case EventKind::Reaction: apply_reaction(net, e); break;
    case EventKind::CoPresence: apply_co_presence(net, e); break;
    case EventKind::ChannelPost:
      if (e.thread && net.has_channel(*e.thread)) e.flags.covert = net.channel(*e.thread).covert;
      apply_channel_post(net, e);
      break;
    case EventKind::Recording: apply_recording(net, e); break;
    case EventKind::ProfileView: apply_profile_view(net, e); break;
    case EventKind::PetitionSign: apply_petition_sign(net, e); break;
    case EventKind::Leak: apply_leak(net, e); break;
  }
  return e;
}

void reply_in_thread(Epinet& net, const std::string& thread, const AgentId& from,
                     const AgentId& to, const PropId& p) {
  auto it = net.threads().find(thread);
  if (it == net.threads().end()) throw EpinetError(ErrorCode::NoSuchThread, thread);
  ThreadState& th = it->second;
  if (th.payload != p)
    throw EpinetError(ErrorCode::NoSuchThread,
                      "thread " + thread + " does not carry " + p.value);
  if (th.participants.count(from) == 0 || th.participants.count(to) == 0)
    throw EpinetError(ErrorCode::NoSuchThread,
                      "reply requires existing participants of " + thread);
  deliver_message(net, th, from, {to}, {}, net.next_event_id());
}

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::set<AgentId> agent_list(const std::string& s) {
  std::set<AgentId> out;
  for (const std::string& name : split_list(s)) out.insert(AgentId{name});
  return out;
}

struct ArgReader {
  const std::string& kind;
  const std::map<std::string, std::string>& args;
  std::set<std::string> allowed;

  std::string require(const std::string& key) {
    allowed.insert(key);
    auto it = args.find(key);
    if (it == args.end() || it->second.empty())
      throw EpinetError(ErrorCode::MalformedEvent, kind + " requires " + key + "=...");
    return it->second;
  }

  std::optional<std::string> optional(const std::string& key) {
    allowed.insert(key);
    auto it = args.find(key);
    if (it == args.end() || it->second.empty()) return std::nullopt;
    return it->second;
  }

  void finish() const {
    for (const auto& [key, _] : args)
      if (!allowed.count(key))
        throw EpinetError(ErrorCode::MalformedEvent, kind + " does not take " + key + "=...");
  }
};

}  // namespace

Event build_event_from_args(const std::string& kind,
                            const std::map<std::string, std::string>& args) {
  Event e;
  e.kind = event_kind_from_string(kind);
  ArgReader in{kind, args, {}};
  switch (e.kind) {
    case EventKind::DirectMessage:
      e.sender = AgentId{in.require("from")};
      e.visible_recipients = agent_list(in.require("to"));
      if (auto bcc = in.optional("bcc")) e.hidden_recipients = agent_list(*bcc);
      e.payload = PropId{in.require("prop")};
      if (auto t = in.optional("thread")) e.thread = *t;
      break;
    case EventKind::AckRead:
      e.sender = AgentId{in.require("from")};
      e.thread = in.require("thread");
      break;
    case EventKind::Broadcast:
      e.sender = AgentId{in.require("from")};
      e.payload = PropId{in.require("prop")};
      if (auto audience = in.optional("audience")) e.visible_recipients = agent_list(*audience);
      break;
    case EventKind::Reaction:
      e.sender = AgentId{in.require("from")};
      e.visible_recipients = {AgentId{in.require("to")}};
      e.payload = PropId{in.require("prop")};
      break;
    case EventKind::CoPresence:
      e.sender = AgentId{in.require("from")};
      e.visible_recipients = agent_list(in.require("to"));
      e.payload = PropId{in.require("prop")};
      break;
    case EventKind::ChannelPost:
      e.sender = AgentId{in.require("from")};
      e.thread = in.require("channel");
      e.payload = PropId{in.require("prop")};
      break;
    case EventKind::Recording:
      e.sender = AgentId{in.require("from")};
      e.visible_recipients = agent_list(in.require("attendees"));
      if (auto viewers = in.optional("viewers")) e.hidden_recipients = agent_list(*viewers);
      e.payload = PropId{in.require("prop")};
      e.flags.consent = in.require("consent") == "true";
      break;
    case EventKind::ProfileView:
      e.sender = AgentId{in.require("from")};
      e.visible_recipients = {AgentId{in.require("owner")}};
      e.payload = PropId{in.require("prop")};
      break;
    case EventKind::PetitionSign:
      e.sender = AgentId{in.require("from")};
      e.payload = PropId{in.require("prop")};
      break;
    case EventKind::Leak:
      e.sender = AgentId{in.require("from")};
      e.visible_recipients = {AgentId{in.require("to")}};
      e.thread = in.require("channel");
      e.payload = PropId{in.require("prop")};
      break;
  }
  in.finish();
  return e;
}

void run_primitive(Epinet& net, const std::string& kind,
                   const std::map<std::string, std::string>& args, std::vector<Event>* log) {
  if (kind == "reply") {
    ArgReader in{kind, args, {}};
    std::string tok = in.require("thread");
    AgentId from{in.require("from")};
    AgentId to{in.require("to")};
    in.finish();
    auto it = net.threads().find(tok);
    if (it == net.threads().end()) throw EpinetError(ErrorCode::NoSuchThread, tok);
    PropId p = it->second.payload;
    reply_in_thread(net, tok, from, to, p);
    if (log) {
      Event e;
      e.kind = EventKind::DirectMessage;
      e.sender = from;
      e.visible_recipients = {to};
      e.payload = p;
      e.thread = tok;
      log->push_back(std::move(e));
    }
    return;
  }
  if (kind == "trust") {
    ArgReader in{kind, args, {}};
    AgentId from{in.require("from")};
    AgentId to{in.require("to")};
    TrustKind tk = trust_kind_from_string(in.require("trust"));
    in.finish();
    set_trust(net, from, to, tk);
    return;
  }
  if (kind == "ck") {
    ArgReader in{kind, args, {}};
    std::set<AgentId> group = agent_list(in.require("group"));
    PropId p{in.require("prop")};
    in.finish();
    net.add_group_ck(group, p);
    return;
  }
  if (kind == "join_ck") {
    ArgReader in{kind, args, {}};
    AgentId joiner{in.require("from")};
    PropId p{in.require("prop")};
    in.finish();
    net.extend_group_ck(p, joiner);
    return;
  }
  Event applied = apply_event(net, build_event_from_args(kind, args));
  if (log) log->push_back(std::move(applied));
}

namespace {

// Platform catalogs are plain data; new platforms go here or into a user
// document, never into engine code.
const char* kBuiltinPresets = R"json({
  "email": {
    "send":  [{"kind": "direct_message", "from": "${from}", "to": "${to}", "prop": "${prop}", "thread": "${thread}"}],
    "reply": [{"kind": "reply", "thread": "${thread}", "from": "${from}", "to": "${to}"}]
  },
  "whatsapp": {
    "send":  [{"kind": "direct_message", "from": "${from}", "to": "${to}", "prop": "${prop}", "thread": "${thread}"},
              {"kind": "ack_read", "from": "${to}", "thread": "${thread}"}],
    "reply": [{"kind": "reply", "thread": "${thread}", "from": "${from}", "to": "${to}"},
              {"kind": "ack_read", "from": "${to}", "thread": "${thread}"}]
  },
  "twitter": {
    "tweet":   [{"kind": "broadcast", "from": "${from}", "prop": "${prop}"}],
    "like":    [{"kind": "reaction", "from": "${from}", "to": "${to}", "prop": "${prop}"}],
    "retweet": [{"kind": "reaction", "from": "${from}", "to": "${to}", "prop": "${prop}"}],
    "comment": [{"kind": "reaction", "from": "${from}", "to": "${to}", "prop": "${prop}"}]
  },
  "youtube": {
    "upload":  [{"kind": "broadcast", "from": "${from}", "prop": "${prop}"}],
    "comment": [{"kind": "reaction", "from": "${from}", "to": "${to}", "prop": "${prop}"}],
    "rate":    [{"kind": "reaction", "from": "${from}", "to": "${to}", "prop": "${prop}"}]
  },
  "zoom": {
    "meet":          [{"kind": "co_presence", "from": "${from}", "to": "${to}", "prop": "${prop}"}],
    "record":        [{"kind": "recording", "from": "${from}", "attendees": "${attendees}", "viewers": "${viewers}", "prop": "${prop}", "consent": "true"}],
    "screen_record": [{"kind": "recording", "from": "${from}", "attendees": "${attendees}", "viewers": "${viewers}", "prop": "${prop}", "consent": "false"}],
    "leak":          [{"kind": "leak", "from": "${from}", "to": "${to}", "channel": "${channel}", "prop": "${prop}"}]
  },
  "slack": {
    "post": [{"kind": "channel_post", "from": "${from}", "channel": "${channel}", "prop": "${prop}"}],
    "leak": [{"kind": "leak", "from": "${from}", "to": "${to}", "channel": "${channel}", "prop": "${prop}"}]
  },
  "linkedin": {
    "view":    [{"kind": "profile_view", "from": "${from}", "owner": "${owner}", "prop": "${prop}"}],
    "connect": [{"kind": "trust", "from": "${from}", "to": "${to}", "trust": "integrity_weak"},
                {"kind": "trust", "from": "${from}", "to": "${to}", "trust": "competence"},
                {"kind": "trust", "from": "${to}", "to": "${from}", "trust": "integrity_weak"},
                {"kind": "trust", "from": "${to}", "to": "${from}", "trust": "competence"}]
  },
  "facebook": {
    "share_circle": [{"kind": "channel_post", "from": "${from}", "channel": "${channel}", "prop": "${prop}"}],
    "post_public":  [{"kind": "broadcast", "from": "${from}", "prop": "${prop}"}]
  },
  "quora": {
    "topic":      [{"kind": "ck", "group": "${members}", "prop": "${prop}"}],
    "join_topic": [{"kind": "join_ck", "from": "${from}", "prop": "${prop}"}],
    "ask":        [{"kind": "broadcast", "from": "${from}", "prop": "${prop}"}],
    "answer":     [{"kind": "reaction", "from": "${from}", "to": "${to}", "prop": "${prop}"}]
  },
  "change_org": {
    "sign": [{"kind": "petition_sign", "from": "${from}", "prop": "${prop}"}]
  }
})json";

std::string substitute(const std::string& tpl, const std::map<std::string, std::string>& args,
                       const std::string& context) {
  std::string out;
  size_t pos = 0;
  while (pos < tpl.size()) {
    size_t open = tpl.find("${", pos);
    if (open == std::string::npos) {
      out += tpl.substr(pos);
      break;
    }
    out += tpl.substr(pos, open - pos);
    size_t close = tpl.find('}', open);
    if (close == std::string::npos)
      throw EpinetError(ErrorCode::ParseError, "unterminated placeholder in preset " + context);
    std::string key = tpl.substr(open + 2, close - open - 2);
    auto it = args.find(key);
    if (it == args.end())
      throw EpinetError(ErrorCode::MalformedEvent, context + " requires " + key + "=...");
    out += it->second;
    pos = close + 1;
  }
  return out;
}

}  // namespace

PresetLibrary PresetLibrary::builtin() { return from_json_text(kBuiltinPresets); }

PresetLibrary PresetLibrary::from_json_text(const std::string& text) {
  PresetLibrary lib;
  try {
    lib.doc_ = json::parse(text);
  } catch (const json::parse_error& e) {
    throw EpinetError(ErrorCode::ParseError, std::string("preset document: ") + e.what());
  }
  if (!lib.doc_.is_object())
    throw EpinetError(ErrorCode::ParseError, "preset document must be an object");
  for (const auto& [platform, actions] : lib.doc_.items()) {
    if (!actions.is_object())
      throw EpinetError(ErrorCode::ParseError, "preset " + platform + " must map actions to arrays");
    for (const auto& [action, templates] : actions.items()) {
      if (!templates.is_array())
        throw EpinetError(ErrorCode::ParseError,
                          "preset action " + platform + "." + action + " must be an array");
      for (const auto& tpl : templates)
        if (!tpl.is_object() || !tpl.contains("kind") || !tpl.at("kind").is_string())
          throw EpinetError(ErrorCode::ParseError, "preset action " + platform + "." + action +
                                                       " templates need a string 'kind'");
    }
  }
  return lib;
}

bool PresetLibrary::has_platform(const std::string& platform) const {
  return doc_.contains(platform);
}

bool PresetLibrary::has_action(const std::string& platform, const std::string& action) const {
  return doc_.contains(platform) && doc_.at(platform).contains(action);
}

const json& PresetLibrary::templates(const std::string& platform, const std::string& action) const {
  if (!has_action(platform, action))
    throw EpinetError(ErrorCode::NoSuchAction, platform + "." + action);
  return doc_.at(platform).at(action);
}

std::vector<std::string> PresetLibrary::platforms() const {
  std::vector<std::string> out;
  for (const auto& [platform, _] : doc_.items()) out.push_back(platform);
  return out;
}

std::vector<Event> run_preset_action(Epinet& net, const PresetLibrary& presets,
                                     const std::string& platform, const std::string& action,
                                     std::map<std::string, std::string> args) {
  const json& templates = presets.templates(platform, action);
  const std::string context = platform + "." + action;

  bool wants_thread = false;
  for (const auto& tpl : templates)
    for (const auto& [_, v] : tpl.items())
      if (v.is_string() && v.get<std::string>().find("${thread}") != std::string::npos)
        wants_thread = true;
  if (wants_thread && !args.count("thread")) args["thread"] = "th:" + net.next_event_id();

  std::vector<Event> applied;
  for (const auto& tpl : templates) {
    std::string kind = substitute(tpl.at("kind").get<std::string>(), args, context);
    std::map<std::string, std::string> fields;
    for (const auto& [key, v] : tpl.items()) {
      if (key == "kind") continue;
      if (!v.is_string())
        throw EpinetError(ErrorCode::ParseError,
                          "preset " + context + ": field " + key + " must be a string");
      fields[key] = substitute(v.get<std::string>(), args, context);
    }
    run_primitive(net, kind, fields, &applied);
  }
  return applied;
}

json event_to_json(const Event& e) {
  json visible = json::array();
  for (const AgentId& a : e.visible_recipients) visible.push_back(a.value);
  json hidden = json::array();
  for (const AgentId& a : e.hidden_recipients) hidden.push_back(a.value);
  return {{"kind", event_kind_name(e.kind)},
          {"sender", e.sender.value},
          {"visible", visible},
          {"hidden", hidden},
          {"payload", e.payload.value},
          {"thread", e.thread ? json(*e.thread) : json(nullptr)},
          {"flags",
           {{"covert", e.flags.covert},
            {"acknowledged", e.flags.acknowledged},
            {"consent", e.flags.consent}}}};
}

}  // namespace epinet
