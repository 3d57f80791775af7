#ifndef EPINET_FORMULA_HPP
#define EPINET_FORMULA_HPP

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "epinet/ids.hpp"

namespace epinet {

// Immutable epistemic statement tree. Shape restrictions are enforced by the
// factory functions:
//   - Not wraps only Knows / Believes / Atom (negation-normal form),
//   - WouldKnow quotes a single atomic proposition.
class Formula {
 public:
  enum class Op { Atom, Knows, Believes, Not, WouldKnow };

  static Formula atom(PropId p);
  static Formula knows(AgentId a, Formula inner);
  static Formula believes(AgentId a, Formula inner);
  static Formula negation(Formula inner);
  // "if p were true, a would know p" -- the quoted subjunctive used for
  // confidence and competence-style statements.
  static Formula would_know(AgentId a, PropId p);

  Op op() const { return op_; }
  const AgentId& agent() const;   // Knows / Believes / WouldKnow
  const PropId& prop() const;     // Atom / WouldKnow
  const Formula& inner() const;   // Knows / Believes / Not

  // Number of nested Knows/Believes operators.
  int depth() const { return depth_; }

  bool mentions_prop(const PropId& p) const;
  bool mentions_agent(const AgentId& a) const;

  // Agent sequence of a pure Knows chain ending in an atom, if this is one.
  std::optional<std::pair<std::vector<AgentId>, PropId>> as_knows_chain() const;

  bool operator==(const Formula& other) const;
  bool operator!=(const Formula& other) const { return !(*this == other); }
  bool operator<(const Formula& other) const;

 private:
  Formula(Op op, AgentId agent, PropId prop, std::shared_ptr<const Formula> inner, int depth)
      : op_(op),
        agent_(std::move(agent)),
        prop_(std::move(prop)),
        inner_(std::move(inner)),
        depth_(depth) {}

  Op op_;
  AgentId agent_;
  PropId prop_;
  std::shared_ptr<const Formula> inner_;
  int depth_;
};

// Canonical text form: K(a,K(b,p)), B(a,p), not(K(a,p)), wkit(a,p).
// Atoms print as the bare proposition id.
std::string to_text(const Formula& f);

// Parses the canonical text form. Bare identifiers are atoms; atom(p) is
// accepted as an explicit spelling. Throws EpinetError(ParseError) with the
// zero-based column of the offending character in the message.
Formula parse_formula(const std::string& text);

// Builds K(a1, K(a2, ... K(an, atom(p)) ...)).
Formula knows_chain(const std::vector<AgentId>& agents, const PropId& p);

}  // namespace epinet

#endif
