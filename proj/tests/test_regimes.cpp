#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "epinet/errors.hpp"
#include "epinet/platform.hpp"
#include "epinet/regimes.hpp"
#include "epinet/serialize.hpp"
#include "oracles.hpp"

using namespace epinet;

namespace {

Formula K(const AgentId& a, Formula f) { return Formula::knows(a, std::move(f)); }
Formula at(const PropId& p) { return Formula::atom(p); }

struct Trio {
  Epinet net;
  AgentId a, b, c;
  PropId p;

  Trio() {
    a = net.add_agent("a");
    b = net.add_agent("b");
    c = net.add_agent("c");
    p = net.add_prop("p", "");
    net.set_world_truth(p, true);
  }
};

std::vector<std::set<AgentId>> members_of(const std::vector<Neighborhood>& hoods) {
  std::vector<std::set<AgentId>> out;
  for (const Neighborhood& h : hoods) out.push_back(h.members);
  return out;
}

}  // namespace

TEST_CASE("distribution") {
  Trio t;
  t.net.assert_facts({K(t.a, at(t.p)), K(t.b, at(t.p))});
  Distribution d = distribution(t.net, t.p, {t.a, t.b, t.c});
  CHECK(d.count == 2);
  CHECK(d.ratio == doctest::Approx(2.0 / 3.0));

  Epinet empty_net = t.net;
  empty_net.retract_facts({K(t.a, at(t.p)), K(t.b, at(t.p))});
  CHECK(distribution(empty_net, t.p, {t.a, t.b, t.c}).count == 0);
  CHECK(distribution(empty_net, t.p, {t.a, t.b, t.c}).ratio == 0.0);

  CHECK_THROWS_AS(distribution(t.net, t.p, {}), EpinetError);

  SUBCASE("a broadcast reaches the whole scope") {
    Event e;
    e.kind = EventKind::Broadcast;
    e.sender = t.a;
    e.payload = t.p;
    apply_event(t.net, e);
    Distribution all = distribution(t.net, t.p, {t.a, t.b, t.c});
    CHECK(all.count == 3);
    CHECK(all.ratio == 1.0);
  }
}

TEST_CASE("commonality_level") {
  Trio t;
  CHECK_THROWS_AS(commonality_level(t.net, {t.a}, t.p), EpinetError);

  SUBCASE("mutual knowledge is level 2") {
    t.net.assert_facts({K(t.a, at(t.p)), K(t.b, at(t.p)), K(t.a, K(t.b, at(t.p))),
                        K(t.b, K(t.a, at(t.p)))});
    CommonalityReport r = commonality_level(t.net, {t.a, t.b}, t.p);
    CHECK_FALSE(r.infinite);
    CHECK(r.level == 2);
  }

  SUBCASE("group record means infinity, including subgroups") {
    t.net.add_group_ck({t.a, t.b, t.c}, t.p);
    CHECK(commonality_level(t.net, {t.a, t.b, t.c}, t.p).infinite);
    CHECK(commonality_level(t.net, {t.a, t.b}, t.p).infinite);
  }

  SUBCASE("level 0 when a member lacks knowledge") {
    t.net.assert_fact(K(t.a, at(t.p)));
    CHECK(commonality_level(t.net, {t.a, t.b}, t.p).level == 0);
  }

  SUBCASE("three-message email thread reaches level 3") {
    PresetLibrary lib = PresetLibrary::builtin();
    run_preset_action(t.net, lib, "email", "send",
                      {{"from", "a"}, {"to", "b"}, {"prop", "p"}, {"thread", "t1"}});
    run_preset_action(t.net, lib, "email", "reply",
                      {{"from", "b"}, {"to", "a"}, {"thread", "t1"}});
    run_preset_action(t.net, lib, "email", "reply",
                      {{"from", "a"}, {"to", "b"}, {"thread", "t1"}});
    CommonalityReport r = commonality_level(t.net, {t.a, t.b}, t.p);
    CHECK_FALSE(r.infinite);
    // oracle: exhaustive chain enumeration to depth 5
    int expected = oracles::commonality(t.net, {t.a, t.b}, t.p, 5);
    CHECK(expected == 3);
    CHECK(r.level == expected);
  }

  SUBCASE("partial records only help covered chains") {
    // pairwise records without a covering one cap out at level 2
    t.net.add_group_ck({t.a, t.b}, t.p);
    t.net.add_group_ck({t.b, t.c}, t.p);
    t.net.add_group_ck({t.a, t.c}, t.p);
    CommonalityReport r = commonality_level(t.net, {t.a, t.b, t.c}, t.p);
    CHECK_FALSE(r.infinite);
    CHECK(r.level == 2);
    CHECK(oracles::commonality(t.net, {t.a, t.b, t.c}, t.p, 6) == 2);
  }
}

TEST_CASE("covert") {
  Trio t;
  AgentId d = t.net.add_agent("d");
  t.net.assert_facts({K(t.a, at(t.p)), K(t.b, at(t.p))});

  CHECK(covert(t.net, t.p, {t.a, t.b}, {t.a, t.b, t.c, d}));

  SUBCASE("an ignorant outsider defeats covertness") {
    t.net.assert_fact(K(t.c, Formula::negation(K(t.c, at(t.p)))));
    CHECK_FALSE(covert(t.net, t.p, {t.a, t.b}, {t.a, t.b, t.c, d}));
  }

  SUBCASE("an unknowing insider defeats covertness") {
    CHECK_FALSE(covert(t.net, t.p, {t.a, t.b, t.c}, {t.a, t.b, t.c, d}));
  }

  SUBCASE("scope must be strict") {
    CHECK_THROWS_AS(covert(t.net, t.p, {t.a, t.b}, {t.a, t.b}), EpinetError);
    CHECK_THROWS_AS(covert(t.net, t.p, {}, {t.a}), EpinetError);
    CHECK_THROWS_AS(covert(t.net, t.p, {t.a, d}, {t.a, t.b, t.c}), EpinetError);
  }

  SUBCASE("covertness implies zero outside distribution") {
    REQUIRE(covert(t.net, t.p, {t.a, t.b}, {t.a, t.b, t.c, d}));
    Distribution outside = distribution(t.net, t.p, {t.c, d});
    CHECK(outside.count == 0);
  }
}

TEST_CASE("find_neighborhoods") {
  Trio t;

  SUBCASE("distribution without interaction gives one distributed set") {
    t.net.assert_facts({K(t.a, at(t.p)), K(t.b, at(t.p)), K(t.c, at(t.p))});
    auto distributed = find_neighborhoods(t.net, t.p, RegimeKind::Distributed);
    REQUIRE(distributed.size() == 1);
    CHECK(distributed[0].members == std::set<AgentId>{t.a, t.b, t.c});
    CHECK(find_neighborhoods(t.net, t.p, RegimeKind::Mutual).empty());
  }

  SUBCASE("co-presence creates a common neighborhood") {
    Event e;
    e.kind = EventKind::CoPresence;
    e.sender = t.a;
    e.visible_recipients = {t.b, t.c};
    e.payload = t.p;
    apply_event(t.net, e);
    auto common = find_neighborhoods(t.net, t.p, RegimeKind::Common);
    REQUIRE(common.size() == 1);
    CHECK(common[0].members == std::set<AgentId>{t.a, t.b, t.c});
  }

  SUBCASE("overlapping mutual pairs stay separate without cross links") {
    t.net.assert_facts({K(t.a, at(t.p)), K(t.b, at(t.p)), K(t.c, at(t.p)),
                        K(t.a, K(t.b, at(t.p))), K(t.b, K(t.a, at(t.p))),
                        K(t.b, K(t.c, at(t.p))), K(t.c, K(t.b, at(t.p)))});
    auto mutual = find_neighborhoods(t.net, t.p, RegimeKind::Mutual);
    auto expected = oracles::neighborhoods_brute(
        t.net, t.p,
        [&](const std::set<AgentId>& s) { return oracles::commonality(t.net, s, t.p, 4) >= 2; },
        2);
    CHECK(members_of(mutual) == expected);
    REQUIRE(mutual.size() == 2);
    CHECK(mutual[0].members == std::set<AgentId>{t.a, t.b});
    CHECK(mutual[1].members == std::set<AgentId>{t.b, t.c});
  }

  SUBCASE("deterministic output") {
    t.net.assert_facts({K(t.a, at(t.p)), K(t.b, at(t.p))});
    auto first = find_neighborhoods(t.net, t.p, RegimeKind::Distributed);
    auto second = find_neighborhoods(t.net, t.p, RegimeKind::Distributed);
    CHECK(first == second);
  }
}

TEST_CASE("mobilization") {
  Trio t;
  PropId ca = t.net.add_prop("commit_a", "a goes if b goes");
  PropId cb = t.net.add_prop("commit_b", "b goes if a goes");
  t.net.set_world_truth(ca, true);
  t.net.set_world_truth(cb, true);
  std::map<AgentId, PropId> commits{{t.a, ca}, {t.b, cb}};

  // commitments true but unknown: nothing moves
  CHECK_FALSE(mobilization_possible(t.net, {t.a, t.b}, commits));

  t.net.assert_facts({K(t.a, at(cb)), K(t.b, at(ca))});
  CHECK(mobilization_possible(t.net, {t.a, t.b}, commits));

  // one direction missing
  t.net.retract_fact(K(t.b, at(ca)));
  CHECK_FALSE(mobilization_possible(t.net, {t.a, t.b}, commits));

  // vacuous single member
  CHECK(mobilization_possible(t.net, {t.a}, {{t.a, ca}}));

  CHECK_THROWS_AS(mobilization_possible(t.net, {t.a, t.c}, commits), EpinetError);
}

TEST_CASE("property: commonality is monotone under added facts") {
  oracles::Gen gen(555);
  for (int round = 0; round < 20; ++round) {
    Epinet net;
    std::vector<AgentId> agents;
    for (int i = 0; i < 3; ++i) agents.push_back(net.add_agent("a" + std::to_string(i)));
    PropId p = net.add_prop("p", "");
    net.set_world_truth(p, true);
    std::set<AgentId> group(agents.begin(), agents.end());
    int last = oracles::commonality(net, group, p, 6);
    for (int i = 0; i < 15; ++i) {
      try {
        net.assert_fact(gen.formula(agents, {p}, 4));
      } catch (const EpinetError&) {
        continue;
      }
      CommonalityReport r = commonality_level(net, group, p);
      int now = r.infinite ? 1000 : r.level;
      CHECK(now >= last);
      last = now;
    }
  }
}

TEST_CASE("property: level n+1 neighborhoods nest inside level n ones") {
  oracles::Gen gen(808);
  for (int round = 0; round < 15; ++round) {
    Epinet net;
    std::vector<AgentId> agents;
    for (int i = 0; i < 4; ++i) agents.push_back(net.add_agent("a" + std::to_string(i)));
    PropId p = net.add_prop("p", "");
    net.set_world_truth(p, true);
    for (int i = 0; i < 25; ++i) {
      try {
        net.assert_fact(gen.formula(agents, {p}, 4));
      } catch (const EpinetError&) {
      }
    }
    auto level2 = find_neighborhoods(net, p, RegimeKind::LevelN, 2);
    auto level3 = find_neighborhoods(net, p, RegimeKind::LevelN, 3);
    for (const Neighborhood& deep : level3) {
      bool nested = false;
      for (const Neighborhood& shallow : level2)
        if (std::includes(shallow.members.begin(), shallow.members.end(), deep.members.begin(),
                          deep.members.end()))
          nested = true;
      CHECK(nested);
    }
  }
}

TEST_CASE("property: neighborhoods match brute force on random nets") {
  oracles::Gen gen(31337);
  for (int round = 0; round < 25; ++round) {
    Epinet net;
    std::vector<AgentId> agents;
    int n = gen.pick(2, 6);
    for (int i = 0; i < n; ++i) agents.push_back(net.add_agent("a" + std::to_string(i)));
    PropId p = net.add_prop("p", "");
    net.set_world_truth(p, true);
    int fact_count = gen.pick(5, 30);
    for (int i = 0; i < fact_count; ++i) {
      try {
        net.assert_fact(gen.formula(agents, {p}, 6));
      } catch (const EpinetError&) {
      }
    }
    if (gen.chance(0.3)) {
      std::set<AgentId> g{agents[0], agents[static_cast<size_t>(gen.pick(1, n - 1))]};
      try {
        net.add_group_ck(g, p);
      } catch (const EpinetError&) {
      }
    }

    auto knows_all = [&](const std::set<AgentId>& s) {
      for (const AgentId& a : s)
        if (!net.holds(Formula::knows(a, Formula::atom(p)))) return false;
      return true;
    };
    CHECK(members_of(find_neighborhoods(net, p, RegimeKind::Distributed)) ==
          oracles::neighborhoods_brute(net, p, knows_all, 1));
    for (int level = 2; level <= 3; ++level) {
      auto mine = members_of(find_neighborhoods(
          net, p, level == 2 ? RegimeKind::Mutual : RegimeKind::LevelN, level));
      auto brute = oracles::neighborhoods_brute(
          net, p,
          [&](const std::set<AgentId>& s) {
            int l = oracles::commonality(net, s, p, 8);
            return l == -1 || l >= level;
          },
          2);
      CHECK(mine == brute);
    }
    auto common_mine = members_of(find_neighborhoods(net, p, RegimeKind::Common));
    auto common_brute = oracles::neighborhoods_brute(
        net, p, [&](const std::set<AgentId>& s) { return net.ck_covers(s, p); }, 2);
    CHECK(common_mine == common_brute);
  }
}
