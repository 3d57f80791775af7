#include "epinet/trust.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

#include "epinet/errors.hpp"

namespace epinet {

const char* trust_kind_name(TrustKind k) {
  switch (k) {
    case TrustKind::IntegrityWeak: return "integrity_weak";
    case TrustKind::IntegrityStrong: return "integrity_strong";
    case TrustKind::Competence: return "competence";
    case TrustKind::Full: return "full";
  }
  return "?";
}

TrustKind trust_kind_from_string(const std::string& s) {
  if (s == "integrity_weak") return TrustKind::IntegrityWeak;
  if (s == "integrity_strong") return TrustKind::IntegrityStrong;
  if (s == "competence") return TrustKind::Competence;
  if (s == "full") return TrustKind::Full;
  throw EpinetError(ErrorCode::ParseError,
                    "unknown trust kind '" + s +
                        "' (expected integrity_weak, integrity_strong, competence or full)");
}

namespace {

std::vector<AgentId> sorted_agents(const Epinet& net) {
  std::vector<AgentId> out;
  out.reserve(net.agents().size());
  for (const auto& [id, a] : net.agents()) out.push_back(id);
  return out;
}

void set_component(TrustCell& cell, TrustKind kind, TrustOrigin origin) {
  auto put = [&](std::optional<TrustOrigin>& slot) {
    if (!slot || (origin == TrustOrigin::Declared && *slot == TrustOrigin::Derived)) slot = origin;
  };
  switch (kind) {
    case TrustKind::IntegrityWeak: put(cell.integrity_weak); break;
    case TrustKind::IntegrityStrong: put(cell.integrity_strong); break;
    case TrustKind::Competence: put(cell.competence); break;
    case TrustKind::Full:
      put(cell.integrity_strong);
      put(cell.competence);
      break;
  }
}

// Bron-Kerbosch with pivoting over an undirected pair predicate; reports
// maximal cliques of size >= 2 in deterministic order.
std::vector<std::set<AgentId>> maximal_cliques(
    const std::vector<AgentId>& agents,
    const std::function<bool(const AgentId&, const AgentId&)>& linked) {
  size_t n = agents.size();
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      adj[i][j] = adj[j][i] = linked(agents[i], agents[j]);

  std::vector<std::set<AgentId>> out;
  std::vector<size_t> R;
  auto bk = [&](auto&& self, std::vector<size_t> P, std::vector<size_t> X) -> void {
    if (P.empty() && X.empty()) {
      if (R.size() >= 2) {
        std::set<AgentId> clique;
        for (size_t i : R) clique.insert(agents[i]);
        out.push_back(std::move(clique));
      }
      return;
    }
    size_t pivot = P.empty() ? X.front() : P.front();
    size_t best = 0;
    for (size_t u : P) {
      size_t deg = 0;
      for (size_t v : P)
        if (adj[u][v]) ++deg;
      if (deg > best) {
        best = deg;
        pivot = u;
      }
    }
    std::vector<size_t> candidates;
    for (size_t v : P)
      if (!adj[pivot][v]) candidates.push_back(v);
    for (size_t v : candidates) {
      std::vector<size_t> P2, X2;
      for (size_t w : P)
        if (adj[v][w]) P2.push_back(w);
      for (size_t w : X)
        if (adj[v][w]) X2.push_back(w);
      R.push_back(v);
      self(self, std::move(P2), std::move(X2));
      R.pop_back();
      P.erase(std::find(P.begin(), P.end(), v));
      X.push_back(v);
    }
  };
  std::vector<size_t> P(n), X;
  for (size_t i = 0; i < n; ++i) P[i] = i;
  bk(bk, std::move(P), std::move(X));
  std::sort(out.begin(), out.end());
  return out;
}

bool weak_pair(const Epinet& net, const AgentId& a, const AgentId& b) {
  const TrustCell* ab = net.find_trust(a, b);
  const TrustCell* ba = net.find_trust(b, a);
  return ab && ba && ab->any_integrity() && ab->competence && ba->any_integrity() &&
         ba->competence;
}

bool is_mutual_full_clique(const Epinet& net, const std::set<AgentId>& clique) {
  if (clique.size() < 2) return false;
  for (const AgentId& a : clique)
    for (const AgentId& b : clique)
      if (a != b && !net.full_trust(a, b)) return false;
  return true;
}

// The clique's canonical status proposition, if it was ever derived.
std::optional<PropId> find_clique_prop(const Epinet& net, const std::set<AgentId>& clique) {
  for (const auto& [p, members] : net.clique_props())
    if (members == clique) return p;
  return std::nullopt;
}

bool is_security_clique(const Epinet& net, const std::set<AgentId>& clique) {
  if (!is_mutual_full_clique(net, clique)) return false;
  auto p = find_clique_prop(net, clique);
  return p && net.ck_covers(clique, *p);
}

}  // namespace

void set_trust(Epinet& net, const AgentId& from, const AgentId& to, TrustKind kind) {
  net.agent(from);
  net.agent(to);
  if (from == to) throw EpinetError(ErrorCode::SelfTrust, "reflexive trust is undefined");
  TrustCell& cell = net.trust_cell(from, to);
  set_component(cell, kind, TrustOrigin::Declared);
  if (cell.full()) net.edge_status_prop(from, to);
}

void trust_closure(Epinet& net) {
  std::vector<AgentId> agents = sorted_agents(net);
  size_t n = agents.size();
  std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (i != j && net.full_trust(agents[i], agents[j])) reach[i][j] = true;
  for (size_t k = 0; k < n; ++k)
    for (size_t i = 0; i < n; ++i) {
      if (!reach[i][k]) continue;
      for (size_t j = 0; j < n; ++j)
        if (reach[k][j]) reach[i][j] = true;
    }
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (i == j || !reach[i][j] || net.full_trust(agents[i], agents[j])) continue;
      TrustCell& cell = net.trust_cell(agents[i], agents[j]);
      set_component(cell, TrustKind::IntegrityStrong, TrustOrigin::Derived);
      set_component(cell, TrustKind::Competence, TrustOrigin::Derived);
      net.edge_status_prop(agents[i], agents[j]);
    }
}

std::vector<std::set<AgentId>> trust_neighborhoods(const Epinet& net) {
  return maximal_cliques(sorted_agents(net),
                         [&](const AgentId& a, const AgentId& b) { return weak_pair(net, a, b); });
}

std::vector<std::set<AgentId>> security_neighborhoods(const Epinet& net) {
  std::vector<std::set<AgentId>> qualifying;
  for (const auto& [p, members] : net.clique_props())
    if (is_mutual_full_clique(net, members) && net.ck_covers(members, p))
      qualifying.push_back(members);
  // Maximality over the qualifying family.
  std::vector<std::set<AgentId>> out;
  for (const auto& s : qualifying) {
    bool dominated = false;
    for (const auto& t : qualifying)
      if (s.size() < t.size() && std::includes(t.begin(), t.end(), s.begin(), s.end())) {
        dominated = true;
        break;
      }
    if (!dominated && std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void derive_security_ck(Epinet& net, const std::set<AgentId>& clique) {
  if (!is_mutual_full_clique(net, clique))
    throw EpinetError(ErrorCode::NotSecurityEligible,
                      "clique must share full trust in both directions on every pair");
  for (const AgentId& a : clique)
    for (const AgentId& b : clique) {
      if (a == b) continue;
      PropId ep{"trust:" + a.value + ">" + b.value + ":strong"};
      if (net.has_prop(ep) && !net.world_true(ep))
        throw EpinetError(ErrorCode::NotSecurityEligible,
                          "trust fact " + ep.value + " is registered but not true");
      net.edge_status_prop(a, b);
    }
  PropId status = net.clique_status_prop(clique);
  if (!net.ck_covers(clique, status)) net.add_group_ck(clique, status);
}

std::optional<Conduit> find_conduit(const Epinet& net, const AgentId& from, const AgentId& to,
                                    ConduitKind kind, Directionality directionality) {
  net.agent(from);
  net.agent(to);
  if (from == to) return std::nullopt;

  auto hop_ok = [&](const AgentId& cur, const AgentId& next) {
    if (!net.full_trust(next, cur)) return false;
    return directionality == Directionality::OneWay || net.full_trust(cur, next);
  };

  if (kind == ConduitKind::Security) {
    std::optional<Conduit> best;
    for (const auto& [p, path] : net.conduit_props()) {
      if (path.size() < 2 || path.front() != from || path.back() != to) continue;
      bool linked = true;
      for (size_t i = 0; linked && i + 1 < path.size(); ++i)
        linked = hop_ok(path[i], path[i + 1]);
      if (!linked) continue;
      std::set<AgentId> members(path.begin(), path.end());
      if (!net.ck_covers(members, p)) continue;
      if (!best || path.size() < best->path.size() ||
          (path.size() == best->path.size() && path < best->path))
        best = Conduit{path, kind, directionality};
    }
    return best;
  }

  // Lexicographically smallest shortest path: distances to the target first,
  // then a greedy walk picking the smallest id that stays on a geodesic.
  std::vector<AgentId> agents = sorted_agents(net);
  std::map<AgentId, int> dist;
  dist[to] = 0;
  std::vector<AgentId> frontier{to};
  while (!frontier.empty()) {
    std::vector<AgentId> next_frontier;
    for (const AgentId& v : frontier)
      for (const AgentId& u : agents) {
        if (dist.count(u) || !hop_ok(u, v)) continue;
        dist[u] = dist[v] + 1;
        next_frontier.push_back(u);
      }
    frontier = std::move(next_frontier);
  }
  if (!dist.count(from)) return std::nullopt;
  Conduit out{{from}, kind, directionality};
  AgentId cur = from;
  while (cur != to) {
    for (const AgentId& next : agents) {
      if (!hop_ok(cur, next)) continue;
      auto it = dist.find(next);
      if (it != dist.end() && it->second == dist[cur] - 1) {
        out.path.push_back(next);
        cur = next;
        break;
      }
    }
  }
  return out;
}

void propagate_assertion(Epinet& net, const AgentId& origin, const PropId& p,
                         const std::set<AgentId>& audience) {
  net.agent(origin);
  net.prop(p);
  if (!net.holds(Formula::knows(origin, Formula::atom(p))))
    throw EpinetError(ErrorCode::OriginIgnorant, origin.value + " does not know " + p.value);
  std::string eid = net.next_event_id();

  std::set<AgentId> visited{origin};
  std::vector<AgentId> frontier{origin};
  while (!frontier.empty()) {
    std::vector<AgentId> next_frontier;
    for (const AgentId& sender : frontier) {
      for (const AgentId& x : audience) {
        if (visited.count(x) || !net.full_trust(x, sender)) continue;
        visited.insert(x);
        next_frontier.push_back(x);
        if (!net.holds(Formula::knows(x, Formula::atom(p)))) {
          assert_superseding(net, {Formula::knows(x, Formula::atom(p)),
                                   Formula::knows(x, Formula::knows(sender, Formula::atom(p)))});
          ProvenanceChain chain;
          if (const ProvenanceChain* prev = net.provenance(sender, p); prev && !prev->stale)
            chain.hops = prev->hops;
          chain.hops.push_back(ProvenanceHop{sender, eid, true});
          net.record_delivery(x, p, std::move(chain));
        }
      }
    }
    std::sort(next_frontier.begin(), next_frontier.end());
    frontier = std::move(next_frontier);
  }
}

InfoClass classify_information(const Epinet& net, const AgentId& holder, const PropId& p) {
  net.agent(holder);
  net.prop(p);
  bool knows = net.holds(Formula::knows(holder, Formula::atom(p)));
  bool believes = net.holds(Formula::believes(holder, Formula::atom(p)));
  if (!knows && !believes)
    throw EpinetError(ErrorCode::NoInformation,
                      holder.value + " holds no information about " + p.value);
  const ProvenanceChain* chain = net.provenance(holder, p);
  if (!chain || chain->stale || chain->hops.empty()) return InfoClass::Origin;
  for (const ProvenanceHop& h : chain->hops)
    if (!h.trusted_at_delivery) return InfoClass::Rumor;
  return InfoClass::Fact;
}

AuthResult authenticate(const Epinet& net, const std::set<AgentId>& clique,
                        const AgentId& claimant) {
  net.agent(claimant);
  if (!is_security_clique(net, clique))
    throw EpinetError(ErrorCode::NotAuthenticatable,
                      "clique lacks the common-knowledge trust record needed to authenticate");
  return clique.count(claimant) ? AuthResult::Insider : AuthResult::Outsider;
}

void record_breach(Epinet& net, const AgentId& leaker, const AgentId& outsider, const PropId& p,
                   const std::set<AgentId>& sg) {
  net.agent(leaker);
  net.agent(outsider);
  net.prop(p);
  if (sg.count(leaker) == 0)
    throw EpinetError(ErrorCode::NotAMember, leaker.value + " is not a member of the subnetwork");
  if (sg.count(outsider) > 0)
    throw EpinetError(ErrorCode::NotAMember, outsider.value + " is a member, not an outsider");
  for (const AgentId& m : sg)
    if (!net.holds(Formula::knows(m, Formula::atom(p))))
      throw EpinetError(ErrorCode::BadScope, p.value + " is not shared within the subnetwork");

  std::string eid = net.next_event_id();
  bool trusted = net.full_trust(outsider, leaker);
  if (trusted && net.world_true(p))
    assert_superseding(net, {Formula::knows(outsider, Formula::atom(p))});
  else
    assert_superseding(net, {Formula::believes(outsider, Formula::atom(p))});
  ProvenanceChain chain;
  if (const ProvenanceChain* prev = net.provenance(leaker, p); prev && !prev->stale)
    chain.hops = prev->hops;
  chain.hops.push_back(ProvenanceHop{leaker, eid, trusted});
  net.record_delivery(outsider, p, std::move(chain));

  PropId breach = net.ensure_prop("breach:" + leaker.value + ":" + p.value,
                                  leaker.value + " disclosed " + p.value + " outside the group");
  net.set_world_truth(breach, true);
  std::vector<Formula> discovered;
  for (const AgentId& m : sg) discovered.push_back(Formula::knows(m, Formula::atom(breach)));
  assert_superseding(net, discovered);
}

void import_trust_csv(Epinet& net, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string body = line.substr(0, line.find('#'));
    while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) body.pop_back();
    if (body.empty()) continue;
    std::istringstream fields(body);
    std::string from, to, kind;
    if (!std::getline(fields, from, ',') || !std::getline(fields, to, ',') ||
        !std::getline(fields, kind))
      throw EpinetError(ErrorCode::ParseError,
                        "trust edge list line " + std::to_string(lineno) +
                            ": expected from,to,kind");
    set_trust(net, AgentId{from}, AgentId{to}, trust_kind_from_string(kind));
  }
}

}  // namespace epinet
