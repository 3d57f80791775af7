#ifndef EPINET_TRUST_HPP
#define EPINET_TRUST_HPP

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "epinet/epinet.hpp"

namespace epinet {

enum class TrustKind { IntegrityWeak, IntegrityStrong, Competence, Full };

const char* trust_kind_name(TrustKind k);
TrustKind trust_kind_from_string(const std::string& s);

enum class ConduitKind { Trust, Security };
enum class Directionality { OneWay, Corridor };

struct Conduit {
  std::vector<AgentId> path;  // length >= 2
  ConduitKind kind = ConduitKind::Trust;
  Directionality directionality = Directionality::OneWay;

  bool operator==(const Conduit&) const = default;
};

enum class InfoClass { Fact, Rumor, Origin };
enum class AuthResult { Insider, Outsider };

// Declares a directed trust component; Full sets both strong integrity and
// competence. When a full edge materializes its status proposition is
// auto-registered and set true.
void set_trust(Epinet& net, const AgentId& from, const AgentId& to, TrustKind kind);

// Closes the full-trust digraph under transitivity; added components carry
// origin=derived. Weak integrity never composes. Idempotent.
void trust_closure(Epinet& net);

// Maximal cliques where every ordered pair carries integrity (weak or strong)
// plus competence trust. Sorted by member lists; cliques have >= 2 members.
std::vector<std::set<AgentId>> trust_neighborhoods(const Epinet& net);

// Maximal cliques of mutual full (strong) trust whose own status proposition
// is common knowledge.
std::vector<std::set<AgentId>> security_neighborhoods(const Epinet& net);

// Turns a mutual full-trust clique into a security neighborhood by recording
// common knowledge of the clique's trust status.
void derive_security_ck(Epinet& net, const std::set<AgentId>& clique);

// Shortest qualifying path from from to to, lexicographically smallest on
// ties. A hop current->next requires that next trusts current (fully); a
// corridor requires full trust both ways. Security conduits additionally
// require the conduit's membership proposition to be common knowledge among
// the path members.
std::optional<Conduit> find_conduit(const Epinet& net, const AgentId& from, const AgentId& to,
                                    ConduitKind kind, Directionality directionality);

// Breadth-first delivery of p from origin along edges where the receiver
// fully trusts the sender, limited to audience. Each reached agent learns p
// and that its sender knows p; provenance grows one trusted hop per level.
void propagate_assertion(Epinet& net, const AgentId& origin, const PropId& p,
                         const std::set<AgentId>& audience);

// Origin for self-held information; fact when every provenance hop crossed a
// full-trust edge at delivery time; rumor otherwise.
InfoClass classify_information(const Epinet& net, const AgentId& holder, const PropId& p);

// Membership check backed by the clique's common-knowledge record. Cliques
// without one (weak-trust neighborhoods) cannot authenticate.
AuthResult authenticate(const Epinet& net, const std::set<AgentId>& clique,
                        const AgentId& claimant);

// Leak of sg-internal p to an outsider: the outsider gains the information
// (knowledge only when it trusts the leaker) and the breach itself becomes
// known to every sg member.
void record_breach(Epinet& net, const AgentId& leaker, const AgentId& outsider, const PropId& p,
                   const std::set<AgentId>& sg);

// Edge list, one "from,to,kind" per line; '#' starts a comment.
void import_trust_csv(Epinet& net, const std::string& text);

}  // namespace epinet

#endif
