#include "epinet/formula.hpp"

#include <cctype>
#include <sstream>

#include "epinet/errors.hpp"

namespace epinet {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidName: return "InvalidName";
    case ErrorCode::InvalidFormula: return "InvalidFormula";
    case ErrorCode::DepthExceeded: return "DepthExceeded";
    case ErrorCode::FactivityViolation: return "FactivityViolation";
    case ErrorCode::NoSuchFact: return "NoSuchFact";
    case ErrorCode::UnknownAgent: return "UnknownAgent";
    case ErrorCode::NoSuchProp: return "NoSuchProp";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyScope: return "EmptyScope";
    case ErrorCode::GroupTooSmall: return "GroupTooSmall";
    case ErrorCode::BadScope: return "BadScope";
    case ErrorCode::IncompleteCommitments: return "IncompleteCommitments";
    case ErrorCode::SelfTrust: return "SelfTrust";
    case ErrorCode::NotSecurityEligible: return "NotSecurityEligible";
    case ErrorCode::OriginIgnorant: return "OriginIgnorant";
    case ErrorCode::NoInformation: return "NoInformation";
    case ErrorCode::NotAuthenticatable: return "NotAuthenticatable";
    case ErrorCode::NotAMember: return "NotAMember";
    case ErrorCode::NoSuchChannel: return "NoSuchChannel";
    case ErrorCode::NoSuchThread: return "NoSuchThread";
    case ErrorCode::NoSuchAction: return "NoSuchAction";
    case ErrorCode::MalformedEvent: return "MalformedEvent";
  }
  return "UnknownError";
}

Formula Formula::atom(PropId p) {
  return Formula(Op::Atom, AgentId{}, std::move(p), nullptr, 0);
}

Formula Formula::knows(AgentId a, Formula inner) {
  int d = inner.depth_ + 1;
  return Formula(Op::Knows, std::move(a), PropId{},
                 std::make_shared<const Formula>(std::move(inner)), d);
}

Formula Formula::believes(AgentId a, Formula inner) {
  int d = inner.depth_ + 1;
  return Formula(Op::Believes, std::move(a), PropId{},
                 std::make_shared<const Formula>(std::move(inner)), d);
}

Formula Formula::negation(Formula inner) {
  switch (inner.op_) {
    case Op::Knows:
    case Op::Believes:
    case Op::Atom:
      break;
    default:
      throw EpinetError(ErrorCode::InvalidFormula,
                        "negation may wrap only Knows, Believes or an atom");
  }
  int d = inner.depth_;
  return Formula(Op::Not, AgentId{}, PropId{},
                 std::make_shared<const Formula>(std::move(inner)), d);
}

Formula Formula::would_know(AgentId a, PropId p) {
  return Formula(Op::WouldKnow, std::move(a), std::move(p), nullptr, 0);
}

const AgentId& Formula::agent() const {
  if (op_ == Op::Atom || op_ == Op::Not)
    throw EpinetError(ErrorCode::InvalidFormula, "formula node has no agent");
  return agent_;
}

const PropId& Formula::prop() const {
  if (op_ != Op::Atom && op_ != Op::WouldKnow)
    throw EpinetError(ErrorCode::InvalidFormula, "formula node has no proposition");
  return prop_;
}

const Formula& Formula::inner() const {
  if (!inner_) throw EpinetError(ErrorCode::InvalidFormula, "formula node has no inner formula");
  return *inner_;
}

bool Formula::mentions_prop(const PropId& p) const {
  switch (op_) {
    case Op::Atom:
    case Op::WouldKnow:
      return prop_ == p;
    default:
      return inner_ && inner_->mentions_prop(p);
  }
}

bool Formula::mentions_agent(const AgentId& a) const {
  if ((op_ == Op::Knows || op_ == Op::Believes || op_ == Op::WouldKnow) && agent_ == a)
    return true;
  return inner_ && inner_->mentions_agent(a);
}

std::optional<std::pair<std::vector<AgentId>, PropId>> Formula::as_knows_chain() const {
  std::vector<AgentId> agents;
  const Formula* cur = this;
  while (cur->op_ == Op::Knows) {
    agents.push_back(cur->agent_);
    cur = cur->inner_.get();
  }
  if (agents.empty() || cur->op_ != Op::Atom) return std::nullopt;
  return std::make_pair(std::move(agents), cur->prop_);
}

bool Formula::operator==(const Formula& other) const {
  if (op_ != other.op_) return false;
  switch (op_) {
    case Op::Atom:
      return prop_ == other.prop_;
    case Op::WouldKnow:
      return agent_ == other.agent_ && prop_ == other.prop_;
    case Op::Not:
      return *inner_ == *other.inner_;
    case Op::Knows:
    case Op::Believes:
      return agent_ == other.agent_ && *inner_ == *other.inner_;
  }
  return false;
}

bool Formula::operator<(const Formula& other) const {
  if (op_ != other.op_) return op_ < other.op_;
  switch (op_) {
    case Op::Atom:
      return prop_ < other.prop_;
    case Op::WouldKnow:
      if (agent_ != other.agent_) return agent_ < other.agent_;
      return prop_ < other.prop_;
    case Op::Not:
      return *inner_ < *other.inner_;
    case Op::Knows:
    case Op::Believes:
      if (agent_ != other.agent_) return agent_ < other.agent_;
      return *inner_ < *other.inner_;
  }
  return false;
}

std::string to_text(const Formula& f) {
  switch (f.op()) {
    case Formula::Op::Atom:
      return f.prop().value;
    case Formula::Op::Knows:
      return "K(" + f.agent().value + "," + to_text(f.inner()) + ")";
    case Formula::Op::Believes:
      return "B(" + f.agent().value + "," + to_text(f.inner()) + ")";
    case Formula::Op::Not:
      return "not(" + to_text(f.inner()) + ")";
    case Formula::Op::WouldKnow:
      return "wkit(" + f.agent().value + "," + f.prop().value + ")";
  }
  return "?";
}

namespace {

struct FormulaParser {
  const std::string& text;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& expected) const {
    throw EpinetError(ErrorCode::ParseError,
                      "formula: expected " + expected + " at column " + std::to_string(pos) +
                          " in '" + text + "'");
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  static bool name_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '>' ||
           c == '.' || c == '#' || c == '-';
  }

  std::string ident() {
    skip_ws();
    size_t start = pos;
    while (pos < text.size() && name_char(text[pos])) ++pos;
    if (pos == start) fail("identifier");
    return text.substr(start, pos - start);
  }

  void expect(char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c) fail(std::string("'") + c + "'");
    ++pos;
  }

  Formula parse() {
    std::string name = ident();
    skip_ws();
    if (pos < text.size() && text[pos] == '(') {
      ++pos;
      Formula out = parse_call(name);
      expect(')');
      return out;
    }
    return Formula::atom(PropId{name});
  }

  Formula parse_call(const std::string& op) {
    if (op == "K" || op == "B") {
      std::string agent = ident();
      expect(',');
      Formula inner = parse();
      return op == "K" ? Formula::knows(AgentId{agent}, std::move(inner))
                       : Formula::believes(AgentId{agent}, std::move(inner));
    }
    if (op == "not") return Formula::negation(parse());
    if (op == "wkit") {
      std::string agent = ident();
      expect(',');
      std::string prop = ident();
      return Formula::would_know(AgentId{agent}, PropId{prop});
    }
    if (op == "atom") return Formula::atom(PropId{ident()});
    fail("one of K, B, not, wkit, atom");
  }
};

}  // namespace

Formula parse_formula(const std::string& text) {
  FormulaParser p{text};
  Formula out = p.parse();
  p.skip_ws();
  if (p.pos != text.size()) p.fail("end of formula");
  return out;
}

Formula knows_chain(const std::vector<AgentId>& agents, const PropId& p) {
  Formula f = Formula::atom(p);
  for (auto it = agents.rbegin(); it != agents.rend(); ++it) f = Formula::knows(*it, std::move(f));
  return f;
}

}  // namespace epinet
