#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "epinet/errors.hpp"
#include "epinet/platform.hpp"
#include "epinet/regimes.hpp"
#include "epinet/serialize.hpp"
#include "epinet/trust.hpp"
#include "oracles.hpp"

using namespace epinet;

namespace {

Formula K(const AgentId& a, Formula f) { return Formula::knows(a, std::move(f)); }
Formula B(const AgentId& a, Formula f) { return Formula::believes(a, std::move(f)); }
Formula at(const PropId& p) { return Formula::atom(p); }

struct Mail {
  Epinet net;
  AgentId alan, betty, charles;
  PropId p;

  Mail() {
    alan = net.add_agent("alan");
    betty = net.add_agent("betty");
    charles = net.add_agent("charles");
    p = net.add_prop("p", "a judgment was entered today");
    net.set_world_truth(p, true);
  }
};

Event message(const AgentId& from, const std::set<AgentId>& to, const PropId& p,
              const std::set<AgentId>& bcc = {}, const std::string& thread = "") {
  Event e;
  e.kind = EventKind::DirectMessage;
  e.sender = from;
  e.visible_recipients = to;
  e.hidden_recipients = bcc;
  e.payload = p;
  if (!thread.empty()) e.thread = thread;
  return e;
}

}  // namespace

TEST_CASE("bcc message produces exactly the asymmetric store") {
  Mail m;
  apply_event(m.net, message(m.alan, {m.betty}, m.p, {m.charles}));

  Formula unseen = Formula::negation(K(m.betty, K(m.charles, at(m.p))));
  std::set<Formula> expected{
      K(m.alan, at(m.p)),
      K(m.betty, at(m.p)),
      K(m.betty, K(m.alan, at(m.p))),
      B(m.alan, K(m.betty, at(m.p))),
      K(m.charles, at(m.p)),
      K(m.charles, K(m.alan, at(m.p))),
      K(m.charles, K(m.betty, at(m.p))),
      B(m.alan, K(m.charles, at(m.p))),
      K(m.alan, unseen),
      K(m.charles, unseen),
      K(m.charles, K(m.alan, unseen)),
  };
  CHECK(m.net.facts() == expected);

  // the ten listed checks
  CHECK(m.net.holds(K(m.alan, at(m.p))));
  CHECK(m.net.holds(B(m.alan, K(m.betty, at(m.p)))));
  CHECK(m.net.holds(K(m.betty, K(m.alan, at(m.p)))));
  CHECK(m.net.holds(B(m.alan, K(m.charles, at(m.p)))));
  CHECK(m.net.holds(K(m.charles, K(m.alan, at(m.p)))));
  CHECK_FALSE(m.net.holds(K(m.betty, K(m.charles, at(m.p)))));
  CHECK(m.net.holds(K(m.charles, K(m.betty, at(m.p)))));
  CHECK(m.net.holds(K(m.charles, unseen)));
  CHECK(m.net.holds(K(m.charles, K(m.alan, unseen))));
  CHECK_FALSE(m.net.holds(K(m.betty, Formula::negation(K(m.betty, K(m.charles, at(m.p)))))));

  // betty holds nothing that mentions charles
  for (const Formula& f : m.net.facts()) {
    if (f.op() == Formula::Op::Knows && f.agent() == m.betty)
      CHECK_FALSE(f.mentions_agent(m.charles));
  }
}

TEST_CASE("plain message leaves sender with belief; ack upgrades it") {
  Mail m;
  apply_event(m.net, message(m.alan, {m.betty}, m.p, {}, "t1"));
  CHECK(m.net.holds(B(m.alan, K(m.betty, at(m.p)))));
  CHECK_FALSE(m.net.holds(K(m.alan, K(m.betty, at(m.p)))));
  CHECK(commonality_level(m.net, {m.alan, m.betty}, m.p).level == 1);

  Event ack;
  ack.kind = EventKind::AckRead;
  ack.sender = m.betty;
  ack.thread = "t1";
  apply_event(m.net, ack);
  CHECK(m.net.holds(K(m.alan, K(m.betty, at(m.p)))));
  CHECK(m.net.holds(K(m.betty, K(m.alan, K(m.betty, at(m.p))))));
  CHECK(commonality_level(m.net, {m.alan, m.betty}, m.p).level == 2);
}

TEST_CASE("reply chain raises the level by exactly one per message") {
  Mail m;
  apply_event(m.net, message(m.alan, {m.betty}, m.p, {}, "t1"));
  CHECK(commonality_level(m.net, {m.alan, m.betty}, m.p).level == 1);
  AgentId from = m.betty, to = m.alan;
  for (int n = 2; n <= 10; ++n) {
    reply_in_thread(m.net, "t1", from, to, m.p);
    CommonalityReport r = commonality_level(m.net, {m.alan, m.betty}, m.p);
    CHECK_FALSE(r.infinite);
    CHECK(r.level == n);
    std::swap(from, to);
  }

  SUBCASE("reply preconditions") {
    CHECK_THROWS_AS(reply_in_thread(m.net, "nope", m.betty, m.alan, m.p), EpinetError);
    CHECK_THROWS_AS(reply_in_thread(m.net, "t1", m.charles, m.alan, m.p), EpinetError);
    try {
      reply_in_thread(m.net, "t1", m.charles, m.alan, m.p);
    } catch (const EpinetError& e) {
      CHECK(e.code() == ErrorCode::NoSuchThread);
    }
  }
}

TEST_CASE("broadcast and reaction") {
  Mail m;
  Event tweet;
  tweet.kind = EventKind::Broadcast;
  tweet.sender = m.alan;
  tweet.payload = m.p;
  apply_event(m.net, tweet);

  CHECK(m.net.holds(K(m.betty, at(m.p))));
  CHECK(m.net.holds(K(m.charles, K(m.alan, at(m.p)))));
  // the sender learns nothing about readership
  CHECK_FALSE(m.net.holds(K(m.alan, K(m.betty, at(m.p)))));
  CHECK_FALSE(m.net.holds(B(m.alan, K(m.betty, at(m.p)))));

  Event like;
  like.kind = EventKind::Reaction;
  like.sender = m.betty;
  like.visible_recipients = {m.alan};
  like.payload = m.p;
  apply_event(m.net, like);
  CHECK(m.net.holds(K(m.alan, K(m.betty, at(m.p)))));
  CHECK(m.net.holds(K(m.betty, K(m.alan, K(m.betty, at(m.p))))));
  // non-reacting viewers stay unknown to the sender
  CHECK_FALSE(m.net.holds(K(m.alan, K(m.charles, at(m.p)))));
}

TEST_CASE("co-presence gives full common knowledge") {
  Mail m;
  Event meet;
  meet.kind = EventKind::CoPresence;
  meet.sender = m.alan;
  meet.visible_recipients = {m.betty, m.charles};
  meet.payload = m.p;
  apply_event(m.net, meet);
  CHECK(commonality_level(m.net, {m.alan, m.betty, m.charles}, m.p).infinite);
  std::vector<AgentId> members{m.alan, m.betty, m.charles};
  for (int d = 1; d <= m.net.config().max_depth; d += 3)
    CHECK(oracles::all_chains_hold(m.net, members, m.p, d));
}

TEST_CASE("channel posts stay inside the channel") {
  Mail m;
  AgentId dana = m.net.add_agent("dana");
  Channel ch;
  ch.id = "ops";
  ch.members = {m.alan, m.betty};
  ch.covert = true;
  ch.host_group = {m.alan, m.betty, m.charles, dana};
  m.net.add_channel(ch);

  Event post;
  post.kind = EventKind::ChannelPost;
  post.sender = m.alan;
  post.thread = "ops";
  post.payload = m.p;
  Event applied = apply_event(m.net, post);
  CHECK(applied.flags.covert);

  CHECK(commonality_level(m.net, {m.alan, m.betty}, m.p).infinite);
  CHECK(m.net.epistemic_state(m.charles, m.p).oblivious);
  CHECK(m.net.epistemic_state(dana, m.p).oblivious);
  CHECK(covert(m.net, m.p, {m.alan, m.betty}, {m.alan, m.betty, m.charles, dana}));

  Event bad;
  bad.kind = EventKind::ChannelPost;
  bad.sender = m.charles;
  bad.thread = "ops";
  bad.payload = m.p;
  CHECK_THROWS_AS(apply_event(m.net, bad), EpinetError);
  bad.thread = "nope";
  bad.sender = m.alan;
  CHECK_THROWS_AS(apply_event(m.net, bad), EpinetError);
}

TEST_CASE("recording") {
  Mail m;
  AgentId viewer = m.net.add_agent("viewer");

  SUBCASE("with consent attendees know it exists but not who watches") {
    Event rec;
    rec.id = "r1";
    rec.kind = EventKind::Recording;
    rec.sender = m.alan;
    rec.visible_recipients = {m.betty};
    rec.hidden_recipients = {viewer};
    rec.payload = m.p;
    rec.flags.consent = true;
    apply_event(m.net, rec);

    PropId exists{"rec:r1"}, viewers{"recviewers:r1"};
    CHECK(m.net.holds(K(m.betty, at(exists))));
    CHECK(m.net.epistemic_state(m.betty, viewers).ignorant);
    CHECK(m.net.holds(K(viewer, at(m.p))));
  }

  SUBCASE("without consent attendees are oblivious of the viewers") {
    Event rec;
    rec.id = "r2";
    rec.kind = EventKind::Recording;
    rec.sender = m.alan;
    rec.visible_recipients = {m.betty};
    rec.hidden_recipients = {viewer};
    rec.payload = m.p;
    rec.flags.consent = false;
    apply_event(m.net, rec);

    CHECK(m.net.holds(K(viewer, at(m.p))));
    CHECK(m.net.epistemic_state(m.betty, m.p).oblivious);
    CHECK_FALSE(m.net.has_prop(PropId{"rec:r2"}));
  }
}

TEST_CASE("profile views") {
  Mail m;
  PropId profile = m.net.add_prop("cv", "owner studied logic");
  m.net.set_world_truth(profile, true);
  PropId premium = m.net.ensure_prop("premium:betty", "betty has a premium account");

  Event view;
  view.kind = EventKind::ProfileView;
  view.sender = m.alan;
  view.visible_recipients = {m.betty};
  view.payload = profile;

  SUBCASE("non-premium owner sees nothing") {
    apply_event(m.net, view);
    CHECK(m.net.holds(K(m.alan, at(profile))));
    CHECK_FALSE(m.net.holds(K(m.betty, K(m.alan, at(profile)))));
  }

  SUBCASE("premium owner learns who looked") {
    m.net.set_world_truth(premium, true);
    apply_event(m.net, view);
    CHECK(m.net.holds(K(m.betty, K(m.alan, at(profile)))));
    CHECK_FALSE(m.net.holds(K(m.alan, K(m.betty, K(m.alan, at(profile))))));
  }

  SUBCASE("viewer aware of premium reaches the third level") {
    m.net.set_world_truth(premium, true);
    m.net.assert_fact(K(m.alan, at(premium)));
    apply_event(m.net, view);
    CHECK(m.net.holds(K(m.alan, K(m.betty, K(m.alan, at(profile))))));
  }
}

TEST_CASE("petition signing builds mutual knowledge of support") {
  Mail m;
  PropId motion = m.net.add_prop("motion", "repair the bridge");
  auto sign = [&](const AgentId& who) {
    Event e;
    e.kind = EventKind::PetitionSign;
    e.sender = who;
    e.payload = motion;
    apply_event(m.net, e);
  };
  sign(m.alan);
  sign(m.betty);
  sign(m.charles);

  std::map<AgentId, PropId> commits;
  for (const AgentId& a : {m.alan, m.betty, m.charles})
    commits.emplace(a, PropId{"supports:" + a.value + ":motion"});
  CHECK(mobilization_possible(m.net, {m.alan, m.betty, m.charles}, commits));
  // pairwise level 2 for the latest support prop
  CHECK(commonality_level(m.net, {m.alan, m.betty}, commits.at(m.charles)).level >= 2);
}

TEST_CASE("leak event delegates to the breach machinery") {
  Mail m;
  AgentId dana = m.net.add_agent("dana");
  Channel ch;
  ch.id = "ops";
  ch.members = {m.alan, m.betty};
  ch.covert = true;
  ch.host_group = {m.alan, m.betty, m.charles, dana};
  m.net.add_channel(ch);

  Event post;
  post.kind = EventKind::ChannelPost;
  post.sender = m.alan;
  post.thread = "ops";
  post.payload = m.p;
  apply_event(m.net, post);
  REQUIRE(covert(m.net, m.p, ch.members, ch.host_group));

  Event leak;
  leak.kind = EventKind::Leak;
  leak.sender = m.betty;
  leak.visible_recipients = {m.charles};
  leak.thread = "ops";
  leak.payload = m.p;
  apply_event(m.net, leak);

  CHECK_FALSE(covert(m.net, m.p, ch.members, ch.host_group));
  PropId breach{"breach:betty:p"};
  CHECK(m.net.holds(K(m.alan, at(breach))));
  CHECK(m.net.holds(K(m.betty, at(breach))));
}

TEST_CASE("event validation") {
  Mail m;
  Event e = message(m.alan, {m.alan}, m.p);
  CHECK_THROWS_AS(apply_event(m.net, e), EpinetError);
  e = message(m.alan, {m.betty}, m.p, {m.betty});
  CHECK_THROWS_AS(apply_event(m.net, e), EpinetError);
  e = message(AgentId{"nobody"}, {m.betty}, m.p);
  CHECK_THROWS_AS(apply_event(m.net, e), EpinetError);
  e = message(m.alan, {m.betty}, PropId{"nothing"});
  CHECK_THROWS_AS(apply_event(m.net, e), EpinetError);
}

TEST_CASE("false payloads degrade to belief") {
  Mail m;
  PropId lie = m.net.add_prop("lie", "the deal closed");
  apply_event(m.net, message(m.alan, {m.betty}, lie));
  CHECK(m.net.holds(B(m.betty, at(lie))));
  CHECK(m.net.holds(B(m.betty, K(m.alan, at(lie)))));
  CHECK_FALSE(m.net.holds(K(m.betty, at(lie))));
  // provenance still records the delivery, untrusted here
  CHECK(classify_information(m.net, m.betty, lie) == InfoClass::Rumor);
}

TEST_CASE("presets") {
  PresetLibrary lib = PresetLibrary::builtin();

  SUBCASE("whatsapp send expands to message plus ack") {
    Mail m;
    auto applied = run_preset_action(m.net, lib, "whatsapp", "send",
                                     {{"from", "alan"}, {"to", "betty"}, {"prop", "p"}});
    REQUIRE(applied.size() == 2);
    CHECK(applied[0].kind == EventKind::DirectMessage);
    CHECK(applied[1].kind == EventKind::AckRead);
    CHECK(commonality_level(m.net, {m.alan, m.betty}, m.p).level == 2);
  }

  SUBCASE("email send leaves belief only") {
    Mail m;
    auto applied = run_preset_action(m.net, lib, "email", "send",
                                     {{"from", "alan"}, {"to", "betty"}, {"prop", "p"}});
    REQUIRE(applied.size() == 1);
    CHECK(commonality_level(m.net, {m.alan, m.betty}, m.p).level == 1);
    CHECK(m.net.holds(B(m.alan, K(m.betty, at(m.p)))));
  }

  SUBCASE("slack covert post keeps the channel covert") {
    Mail m;
    AgentId dana = m.net.add_agent("dana");
    Channel ch;
    ch.id = "ops";
    ch.members = {m.alan, m.betty};
    ch.covert = true;
    ch.host_group = {m.alan, m.betty, m.charles, dana};
    m.net.add_channel(ch);
    run_preset_action(m.net, lib, "slack", "post",
                      {{"from", "alan"}, {"channel", "ops"}, {"prop", "p"}});
    CHECK(covert(m.net, m.p, ch.members, ch.host_group));
  }

  SUBCASE("linkedin connect creates weak trust both ways") {
    Mail m;
    run_preset_action(m.net, lib, "linkedin", "connect", {{"from", "alan"}, {"to", "betty"}});
    auto cliques = trust_neighborhoods(m.net);
    REQUIRE(cliques.size() == 1);
    CHECK(cliques[0] == std::set<AgentId>{m.alan, m.betty});
    CHECK_FALSE(m.net.full_trust(m.alan, m.betty));
  }

  SUBCASE("quora topics are common knowledge and joinable") {
    Mail m;
    PropId topic = m.net.add_prop("topic", "modal logic");
    m.net.set_world_truth(topic, true);
    run_preset_action(m.net, lib, "quora", "topic",
                      {{"members", "alan,betty"}, {"prop", "topic"}});
    CHECK(commonality_level(m.net, {m.alan, m.betty}, topic).infinite);
    run_preset_action(m.net, lib, "quora", "join_topic",
                      {{"from", "charles"}, {"prop", "topic"}});
    CHECK(commonality_level(m.net, {m.alan, m.betty, m.charles}, topic).infinite);
  }

  SUBCASE("change_org signers can mobilize") {
    Mail m;
    PropId motion = m.net.add_prop("motion", "fix the bridge");
    for (const char* who : {"alan", "betty"})
      run_preset_action(m.net, lib, "change_org", "sign", {{"from", who}, {"prop", "motion"}});
    std::map<AgentId, PropId> commits{{m.alan, PropId{"supports:alan:motion"}},
                                      {m.betty, PropId{"supports:betty:motion"}}};
    CHECK(mobilization_possible(m.net, {m.alan, m.betty}, commits));
  }

  SUBCASE("unknown actions and missing arguments") {
    Mail m;
    CHECK_THROWS_AS(run_preset_action(m.net, lib, "whatsapp", "frobnicate", {}), EpinetError);
    try {
      run_preset_action(m.net, lib, "nosuch", "send", {});
    } catch (const EpinetError& e) {
      CHECK(e.code() == ErrorCode::NoSuchAction);
    }
    CHECK_THROWS_AS(
        run_preset_action(m.net, lib, "whatsapp", "send", {{"from", "alan"}}), EpinetError);
  }
}

TEST_CASE("property: hidden recipients never leak to the visible side") {
  oracles::Gen gen(60609);
  for (int round = 0; round < 25; ++round) {
    Epinet net;
    std::vector<AgentId> agents;
    for (int i = 0; i < 4; ++i) agents.push_back(net.add_agent("a" + std::to_string(i)));
    std::vector<PropId> props;
    for (int i = 0; i < 2; ++i) {
      props.push_back(net.add_prop("p" + std::to_string(i), ""));
      net.set_world_truth(props.back(), true);
    }
    for (int step = 0; step < 8; ++step) {
      int s = gen.pick(0, 3), v = gen.pick(0, 3), h = gen.pick(0, 3);
      if (s == v || s == h || v == h) continue;
      Event e;
      e.kind = EventKind::DirectMessage;
      e.sender = agents[static_cast<size_t>(s)];
      e.visible_recipients = {agents[static_cast<size_t>(v)]};
      e.hidden_recipients = {agents[static_cast<size_t>(h)]};
      e.payload = gen.choose(props);
      std::set<Formula> before = net.facts();
      try {
        apply_event(net, e);
      } catch (const EpinetError&) {
        continue;
      }
      // this event delivered nothing to its visible recipient that mentions
      // its hidden recipient
      for (const Formula& f : net.facts()) {
        if (before.count(f)) continue;
        if (f.op() != Formula::Op::Knows && f.op() != Formula::Op::Believes) continue;
        if (f.agent() != agents[static_cast<size_t>(v)]) continue;
        CHECK_FALSE(f.mentions_agent(agents[static_cast<size_t>(h)]));
      }
    }
  }
}

TEST_CASE("property: identical event sequences give identical snapshots") {
  auto build = [] {
    Mail m;
    PresetLibrary lib = PresetLibrary::builtin();
    apply_event(m.net, message(m.alan, {m.betty}, m.p, {m.charles}, "t1"));
    run_preset_action(m.net, lib, "twitter", "tweet", {{"from", "betty"}, {"prop", "p"}});
    Event like;
    like.kind = EventKind::Reaction;
    like.sender = m.charles;
    like.visible_recipients = {m.betty};
    like.payload = m.p;
    apply_event(m.net, like);
    return snapshot(m.net);
  };
  CHECK(build() == build());
}
