#include "epinet/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "epinet/regimes.hpp"
#include "epinet/serialize.hpp"
#include "epinet/trust.hpp"

namespace epinet {

using nlohmann::json;

namespace {

struct Token {
  std::string text;
  int col = 0;  // 1-based
};

// Whitespace-separated tokens; a double-quoted region is one token without
// the quotes.
std::vector<Token> tokenize(const std::string& line, int lineno) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    if (line[i] == '#') break;
    int col = static_cast<int>(i) + 1;
    std::string text;
    if (line[i] == '"') {
      ++i;
      while (i < line.size() && line[i] != '"') text += line[i++];
      if (i >= line.size()) throw ScenarioError(lineno, col, "unterminated string");
      ++i;
    } else {
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) text += line[i++];
    }
    out.push_back(Token{std::move(text), col});
  }
  return out;
}

const std::vector<std::string> kKeywords = {
    "agent",   "prop",    "truth",     "trust",     "channel",         "preset",
    "config",  "conduit_prop", "import_trust", "assert", "retract",    "ck",
    "closure", "propagate", "derive_security", "event", "query"};

const std::vector<std::string> kQueryKinds = {
    "holds",        "state",          "distribution", "level",    "covert",
    "neighborhoods", "mobilization",  "trust_cliques", "security_cliques",
    "conduit",      "classify",       "authenticate"};

std::string joined(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += out.empty() ? s : ", " + s;
  return out;
}

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

struct Parser {
  std::set<std::string> agents, props, channels, presets;

  void check_agent(const std::string& name, int line, int col) const {
    if (!agents.count(name))
      throw ScenarioError(line, col, "agent '" + name + "' is not declared");
  }

  void check_prop(const std::string& name, int line, int col) const {
    // Canonical propositions (trust:, supports:, ...) come into being at run
    // time and are exempt from the declaration check.
    if (name.find(':') != std::string::npos) return;
    if (!props.count(name))
      throw ScenarioError(line, col, "proposition '" + name + "' is not declared");
  }

  void check_agent_list(const std::string& value, int line, int col) const {
    for (const std::string& name : split_list(value)) check_agent(name, line, col);
  }

  void check_formula(const std::string& text, int line, int col, std::string* canonical) const {
    Formula f = [&] {
      try {
        return parse_formula(text);
      } catch (const EpinetError& e) {
        throw ScenarioError(line, col, e.what());
      }
    }();
    std::vector<const Formula*> stack{&f};
    while (!stack.empty()) {
      const Formula* cur = stack.back();
      stack.pop_back();
      switch (cur->op()) {
        case Formula::Op::Atom:
          check_prop(cur->prop().value, line, col);
          break;
        case Formula::Op::WouldKnow:
          check_agent(cur->agent().value, line, col);
          check_prop(cur->prop().value, line, col);
          break;
        case Formula::Op::Not:
          stack.push_back(&cur->inner());
          break;
        case Formula::Op::Knows:
        case Formula::Op::Believes:
          check_agent(cur->agent().value, line, col);
          stack.push_back(&cur->inner());
          break;
      }
    }
    *canonical = to_text(f);
  }
};

// key=value tokens into the statement's arg map; bare flag tokens allowed
// when listed.
void parse_args(Statement& st, const std::vector<Token>& tokens, size_t first,
                const std::set<std::string>& flags = {}) {
  for (size_t i = first; i < tokens.size(); ++i) {
    const Token& t = tokens[i];
    size_t eq = t.text.find('=');
    if (eq == std::string::npos) {
      if (flags.count(t.text)) {
        st.args[t.text] = "true";
        continue;
      }
      throw ScenarioError(st.line, t.col, "expected key=value, got '" + t.text + "'");
    }
    st.args[t.text.substr(0, eq)] = t.text.substr(eq + 1);
  }
}

std::string require_arg(const Statement& st, const std::string& key) {
  auto it = st.args.find(key);
  if (it == st.args.end() || it->second.empty())
    throw ScenarioError(st.line, 1, st.kind + " requires " + key + "=...");
  return it->second;
}

std::string rest_of_line(const std::string& line, const std::vector<Token>& tokens, size_t from) {
  if (from >= tokens.size()) return "";
  size_t start = static_cast<size_t>(tokens[from].col) - 1;
  return line.substr(start);
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  Scenario scenario;
  Parser ctx;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  auto need = [&](const std::vector<Token>& tokens, size_t index, const std::string& what,
                  int fallback_col) -> const Token& {
    if (index >= tokens.size())
      throw ScenarioError(lineno, fallback_col, "expected " + what);
    return tokens[index];
  };

  while (std::getline(in, line)) {
    ++lineno;
    std::vector<Token> tokens = tokenize(line, lineno);
    if (tokens.empty()) continue;

    Statement st;
    st.line = lineno;
    const Token& head = tokens[0];
    std::string keyword = head.text;
    if (keyword.rfind("query@", 0) == 0) {
      std::string n = keyword.substr(6);
      if (n.empty() || !std::all_of(n.begin(), n.end(),
                                    [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw ScenarioError(lineno, head.col, "query@<k> needs a non-negative event index");
      st.query_at = std::stoi(n);
      keyword = "query";
    }
    if (std::find(kKeywords.begin(), kKeywords.end(), keyword) == kKeywords.end())
      throw ScenarioError(lineno, head.col,
                          "unknown statement '" + keyword + "' (expected one of " +
                              joined(kKeywords) + ")");
    st.kind = keyword;
    int end_col = static_cast<int>(line.size()) + 1;

    if (keyword == "agent") {
      const Token& name = need(tokens, 1, "agent name", end_col);
      if (ctx.agents.count(name.text))
        throw ScenarioError(lineno, name.col, "duplicate agent '" + name.text + "'");
      ctx.agents.insert(name.text);
      st.positional = {name.text};
    } else if (keyword == "prop") {
      const Token& name = need(tokens, 1, "proposition name", end_col);
      const Token& stmt = need(tokens, 2, "quoted statement", end_col);
      if (ctx.props.count(name.text))
        throw ScenarioError(lineno, name.col, "duplicate proposition '" + name.text + "'");
      ctx.props.insert(name.text);
      st.positional = {name.text};
      st.quoted = stmt.text;
    } else if (keyword == "truth") {
      const Token& name = need(tokens, 1, "proposition name", end_col);
      const Token& value = need(tokens, 2, "true or false", end_col);
      ctx.check_prop(name.text, lineno, name.col);
      if (value.text != "true" && value.text != "false")
        throw ScenarioError(lineno, value.col, "expected true or false");
      st.positional = {name.text, value.text};
    } else if (keyword == "trust") {
      const Token& from = need(tokens, 1, "agent", end_col);
      const Token& to = need(tokens, 2, "agent", end_col);
      const Token& kind = need(tokens, 3, "trust kind", end_col);
      ctx.check_agent(from.text, lineno, from.col);
      ctx.check_agent(to.text, lineno, to.col);
      try {
        trust_kind_from_string(kind.text);
      } catch (const EpinetError& e) {
        throw ScenarioError(lineno, kind.col, e.what());
      }
      st.positional = {from.text, to.text, kind.text};
    } else if (keyword == "channel") {
      const Token& name = need(tokens, 1, "channel name", end_col);
      if (ctx.channels.count(name.text))
        throw ScenarioError(lineno, name.col, "duplicate channel '" + name.text + "'");
      st.positional = {name.text};
      parse_args(st, tokens, 2, {"covert"});
      ctx.check_agent_list(require_arg(st, "members"), lineno, name.col);
      if (st.args.count("host")) ctx.check_agent_list(st.args.at("host"), lineno, name.col);
      ctx.channels.insert(name.text);
    } else if (keyword == "preset") {
      const Token& name = need(tokens, 1, "platform name", end_col);
      ctx.presets.insert(name.text);
      st.positional = {name.text};
    } else if (keyword == "config") {
      const Token& key = need(tokens, 1, "max_depth or factivity", end_col);
      const Token& value = need(tokens, 2, "value", end_col);
      if (key.text == "max_depth") {
        if (!std::all_of(value.text.begin(), value.text.end(), [](char c) {
              return std::isdigit(static_cast<unsigned char>(c));
            }))
          throw ScenarioError(lineno, value.col, "max_depth needs a number");
      } else if (key.text == "factivity") {
        if (value.text != "on" && value.text != "off")
          throw ScenarioError(lineno, value.col, "factivity is on or off");
      } else {
        throw ScenarioError(lineno, key.col, "expected max_depth or factivity");
      }
      st.positional = {key.text, value.text};
    } else if (keyword == "conduit_prop") {
      parse_args(st, tokens, 1);
      ctx.check_agent_list(require_arg(st, "path"), lineno, head.col);
    } else if (keyword == "import_trust") {
      const Token& path = need(tokens, 1, "file path", end_col);
      st.positional = {path.text};
    } else if (keyword == "assert" || keyword == "retract") {
      std::string raw = rest_of_line(line, tokens, 1);
      if (raw.empty()) throw ScenarioError(lineno, end_col, "expected formula");
      std::string canonical;
      ctx.check_formula(raw, lineno, tokens[1].col, &canonical);
      st.quoted = canonical;
    } else if (keyword == "ck") {
      parse_args(st, tokens, 1);
      ctx.check_agent_list(require_arg(st, "group"), lineno, head.col);
      ctx.check_prop(require_arg(st, "prop"), lineno, head.col);
    } else if (keyword == "closure") {
      // no arguments
    } else if (keyword == "propagate") {
      parse_args(st, tokens, 1);
      ctx.check_agent(require_arg(st, "from"), lineno, head.col);
      ctx.check_prop(require_arg(st, "prop"), lineno, head.col);
      if (st.args.count("audience")) ctx.check_agent_list(st.args.at("audience"), lineno, head.col);
    } else if (keyword == "derive_security") {
      parse_args(st, tokens, 1);
      ctx.check_agent_list(require_arg(st, "clique"), lineno, head.col);
    } else if (keyword == "event") {
      const Token& kind = need(tokens, 1, "event kind", end_col);
      st.event_kind = kind.text;
      parse_args(st, tokens, 2);
      size_t dot = kind.text.find('.');
      if (dot != std::string::npos) {
        std::string platform = kind.text.substr(0, dot);
        if (!ctx.presets.count(platform))
          throw ScenarioError(lineno, kind.col, "preset '" + platform + "' is not declared");
      } else if (kind.text != "reply") {
        try {
          event_kind_from_string(kind.text);
        } catch (const EpinetError& e) {
          throw ScenarioError(lineno, kind.col, e.what());
        }
      }
      static const std::set<std::string> agent_keys = {"from", "to",        "bcc",   "owner",
                                                       "audience", "attendees", "viewers"};
      for (const auto& [key, value] : st.args) {
        if (agent_keys.count(key)) ctx.check_agent_list(value, lineno, kind.col);
        if (key == "prop") ctx.check_prop(value, lineno, kind.col);
        if (key == "channel" && !ctx.channels.count(value))
          throw ScenarioError(lineno, kind.col, "channel '" + value + "' is not declared");
      }
    } else if (keyword == "query") {
      const Token& qkind = need(tokens, 1, "query kind", end_col);
      if (std::find(kQueryKinds.begin(), kQueryKinds.end(), qkind.text) == kQueryKinds.end())
        throw ScenarioError(lineno, qkind.col,
                            "unknown query '" + qkind.text + "' (expected one of " +
                                joined(kQueryKinds) + ")");
      st.event_kind = qkind.text;
      if (qkind.text == "holds") {
        std::string raw = rest_of_line(line, tokens, 2);
        if (raw.empty()) throw ScenarioError(lineno, end_col, "expected formula");
        Formula f = [&] {
          try {
            return parse_formula(raw);
          } catch (const EpinetError& e) {
            throw ScenarioError(lineno, tokens[2].col, e.what());
          }
        }();
        st.quoted = to_text(f);
      } else if (qkind.text == "state") {
        const Token& a = need(tokens, 2, "agent", end_col);
        const Token& p = need(tokens, 3, "proposition", end_col);
        st.positional = {a.text, p.text};
      } else if (qkind.text == "distribution" || qkind.text == "level" ||
                 qkind.text == "covert" || qkind.text == "neighborhoods") {
        const Token& p = need(tokens, 2, "proposition", end_col);
        st.positional = {p.text};
        parse_args(st, tokens, 3);
        if (qkind.text == "distribution") require_arg(st, "scope");
        if (qkind.text == "level") require_arg(st, "group");
        if (qkind.text == "covert") {
          require_arg(st, "sg");
          require_arg(st, "g");
        }
        if (qkind.text == "neighborhoods") {
          std::string kind = require_arg(st, "kind");
          if (kind != "distributed" && kind != "mutual" && kind != "common" &&
              kind.rfind("level_n:", 0) != 0)
            throw ScenarioError(lineno, end_col,
                                "kind must be distributed, mutual, common or level_n:<n>");
        }
      } else if (qkind.text == "mobilization") {
        parse_args(st, tokens, 2);
        require_arg(st, "group");
        require_arg(st, "commits");
      } else if (qkind.text == "conduit") {
        parse_args(st, tokens, 2);
        require_arg(st, "from");
        require_arg(st, "to");
        std::string kind = require_arg(st, "kind");
        if (kind != "trust" && kind != "security")
          throw ScenarioError(lineno, end_col, "kind must be trust or security");
        std::string dir = require_arg(st, "dir");
        if (dir != "one_way" && dir != "corridor")
          throw ScenarioError(lineno, end_col, "dir must be one_way or corridor");
      } else if (qkind.text == "classify") {
        parse_args(st, tokens, 2);
        require_arg(st, "holder");
        require_arg(st, "prop");
      } else if (qkind.text == "authenticate") {
        parse_args(st, tokens, 2);
        require_arg(st, "clique");
        require_arg(st, "claimant");
      }
      // trust_cliques / security_cliques take no arguments
    }
    scenario.statements.push_back(std::move(st));
  }
  return scenario;
}

std::string print_scenario(const Scenario& scenario) {
  std::ostringstream out;
  for (const Statement& st : scenario.statements) {
    if (st.kind == "query") {
      out << "query";
      if (st.query_at) out << "@" << *st.query_at;
      out << " " << st.event_kind;
      if (st.event_kind == "holds") out << " " << st.quoted;
      for (const std::string& p : st.positional) out << " " << p;
      for (const auto& [k, v] : st.args) out << " " << k << "=" << v;
      out << "\n";
      continue;
    }
    out << st.kind;
    if (st.kind == "event") out << " " << st.event_kind;
    for (const std::string& p : st.positional) out << " " << p;
    if (st.kind == "prop") out << " \"" << st.quoted << "\"";
    if (st.kind == "assert" || st.kind == "retract") out << " " << st.quoted;
    for (const auto& [k, v] : st.args) out << " " << k << "=" << v;
    out << "\n";
  }
  return out.str();
}

namespace {

json neighborhood_json(const Epinet& net, const Neighborhood& hood) {
  json members = json::array();
  for (const AgentId& a : hood.members) members.push_back(a.value);
  json level;
  switch (hood.kind) {
    case RegimeKind::Distributed:
      level = 1;
      break;
    case RegimeKind::Common:
      level = "infinity";
      break;
    default: {
      CommonalityReport report = commonality_level(net, hood.members, hood.prop);
      level = report.infinite ? json("infinity") : json(report.level);
    }
  }
  const char* kind_name = hood.kind == RegimeKind::Distributed ? "distributed"
                          : hood.kind == RegimeKind::Mutual    ? "mutual"
                          : hood.kind == RegimeKind::Common    ? "common"
                                                               : "level_n";
  return {{"members", members}, {"prop", hood.prop.value}, {"kind", kind_name}, {"level", level}};
}

json clique_list_json(const std::vector<std::set<AgentId>>& cliques) {
  json out = json::array();
  for (const auto& clique : cliques) {
    json members = json::array();
    for (const AgentId& a : clique) members.push_back(a.value);
    out.push_back(members);
  }
  return out;
}

json eval_query(const Epinet& net, const Statement& st) {
  const std::string& kind = st.event_kind;
  if (kind == "holds") return net.holds(parse_formula(st.quoted));
  if (kind == "state") {
    StateLabels labels = net.epistemic_state(AgentId{st.positional[0]}, PropId{st.positional[1]});
    return json(labels.to_strings());
  }
  if (kind == "distribution") {
    Distribution d =
        distribution(net, PropId{st.positional[0]}, agent_list(st.args.at("scope")));
    return {{"count", d.count}, {"ratio", d.ratio}};
  }
  if (kind == "level") {
    CommonalityReport report =
        commonality_level(net, agent_list(st.args.at("group")), PropId{st.positional[0]});
    return {{"level", report.infinite ? json("infinity") : json(report.level)}};
  }
  if (kind == "covert")
    return covert(net, PropId{st.positional[0]}, agent_list(st.args.at("sg")),
                  agent_list(st.args.at("g")));
  if (kind == "neighborhoods") {
    std::string which = st.args.at("kind");
    RegimeKind rk = RegimeKind::Distributed;
    int n = 2;
    if (which == "mutual") rk = RegimeKind::Mutual;
    else if (which == "common") rk = RegimeKind::Common;
    else if (which.rfind("level_n:", 0) == 0) {
      rk = RegimeKind::LevelN;
      n = std::stoi(which.substr(8));
    }
    json out = json::array();
    for (const Neighborhood& hood : find_neighborhoods(net, PropId{st.positional[0]}, rk, n))
      out.push_back(neighborhood_json(net, hood));
    return out;
  }
  if (kind == "mobilization") {
    std::map<AgentId, PropId> commits;
    for (const std::string& entry : split_list(st.args.at("commits"))) {
      size_t colon = entry.find(':');
      if (colon == std::string::npos)
        throw EpinetError(ErrorCode::ParseError, "commits entries look like agent:prop");
      commits.emplace(AgentId{entry.substr(0, colon)}, PropId{entry.substr(colon + 1)});
    }
    return mobilization_possible(net, agent_list(st.args.at("group")), commits);
  }
  if (kind == "trust_cliques") return clique_list_json(trust_neighborhoods(net));
  if (kind == "security_cliques") return clique_list_json(security_neighborhoods(net));
  if (kind == "conduit") {
    ConduitKind ck = st.args.at("kind") == "trust" ? ConduitKind::Trust : ConduitKind::Security;
    Directionality dir =
        st.args.at("dir") == "one_way" ? Directionality::OneWay : Directionality::Corridor;
    auto conduit = find_conduit(net, AgentId{st.args.at("from")}, AgentId{st.args.at("to")}, ck, dir);
    if (!conduit) return nullptr;
    json path = json::array();
    for (const AgentId& a : conduit->path) path.push_back(a.value);
    return {{"path", path},
            {"kind", st.args.at("kind")},
            {"directionality", st.args.at("dir")}};
  }
  if (kind == "classify") {
    InfoClass c = classify_information(net, AgentId{st.args.at("holder")}, PropId{st.args.at("prop")});
    return c == InfoClass::Fact ? "fact" : c == InfoClass::Rumor ? "rumor" : "origin";
  }
  if (kind == "authenticate") {
    AuthResult r = authenticate(net, agent_list(st.args.at("clique")), AgentId{st.args.at("claimant")});
    return r == AuthResult::Insider ? "insider" : "outsider";
  }
  throw EpinetError(ErrorCode::ParseError, "unknown query kind " + kind);
}

}  // namespace

json Report::to_json() const {
  json qs = json::array();
  for (const QueryResult& q : queries)
    qs.push_back({{"line", q.line},
                  {"at", q.at ? json(*q.at) : json(nullptr)},
                  {"kind", q.kind},
                  {"result", q.result}});
  return {{"queries", qs}, {"digest", digest}};
}

std::string Report::to_pretty() const {
  std::ostringstream out;
  for (const QueryResult& q : queries) {
    out << "L" << q.line;
    if (q.at) out << " @" << *q.at;
    out << "  " << q.kind << "  " << q.result.dump() << "\n";
  }
  out << "digest  " << digest << "\n";
  return out.str();
}

RunOutput run_scenario(const Scenario& scenario, const RunOptions& options) {
  PresetLibrary fallback = PresetLibrary::builtin();
  const PresetLibrary& presets = options.presets ? *options.presets : fallback;

  RunOutput out;
  Epinet net;
  std::vector<Epinet> snapshots;  // snapshots[k] = state right after event k
  int events_seen = 0;
  std::vector<const Statement*> queries;

  // Dynamic mutations are event-indexed for query@<k>; pure declarations are
  // not.
  static const std::set<std::string> indexed = {
      "assert",  "retract",   "ck",           "closure", "propagate",
      "derive_security", "import_trust", "conduit_prop", "event"};

  for (const Statement& st : scenario.statements) {
    bool is_indexed = indexed.count(st.kind) > 0;
    if (is_indexed && events_seen == 0) snapshots.push_back(net);
    try {
      if (st.kind == "query") {
        queries.push_back(&st);
      } else if (st.kind == "agent") {
        net.add_agent(st.positional[0]);
      } else if (st.kind == "prop") {
        net.add_prop(st.positional[0], st.quoted);
      } else if (st.kind == "truth") {
        net.set_world_truth(PropId{st.positional[0]}, st.positional[1] == "true");
      } else if (st.kind == "trust") {
        set_trust(net, AgentId{st.positional[0]}, AgentId{st.positional[1]},
                  trust_kind_from_string(st.positional[2]));
      } else if (st.kind == "channel") {
        Channel ch;
        ch.id = st.positional[0];
        ch.members = agent_list(st.args.at("members"));
        ch.covert = st.args.count("covert") && st.args.at("covert") == "true";
        if (st.args.count("host")) {
          ch.host_group = agent_list(st.args.at("host"));
        } else {
          for (const auto& [id, _] : net.agents()) ch.host_group.insert(id);
        }
        net.add_channel(std::move(ch));
      } else if (st.kind == "preset") {
        if (!presets.has_platform(st.positional[0]))
          throw EpinetError(ErrorCode::NoSuchAction, "no preset for platform " + st.positional[0]);
      } else if (st.kind == "config") {
        Config cfg = net.config();
        if (st.positional[0] == "max_depth") cfg.max_depth = std::stoi(st.positional[1]);
        else cfg.factivity_enforced = st.positional[1] == "on";
        net.set_config(cfg);
      } else if (st.kind == "conduit_prop") {
        std::vector<AgentId> path;
        for (const std::string& name : split_list(st.args.at("path"))) path.push_back(AgentId{name});
        net.conduit_status_prop(path);
      } else if (st.kind == "import_trust") {
        std::string path = st.positional[0];
        if (!options.base_dir.empty() && path.front() != '/')
          path = options.base_dir + "/" + path;
        std::ifstream file(path);
        if (!file) throw IoError("cannot open trust edge list " + path);
        std::stringstream buf;
        buf << file.rdbuf();
        import_trust_csv(net, buf.str());
      } else if (st.kind == "assert") {
        net.assert_fact(parse_formula(st.quoted));
      } else if (st.kind == "retract") {
        net.retract_fact(parse_formula(st.quoted));
      } else if (st.kind == "ck") {
        net.add_group_ck(agent_list(st.args.at("group")), PropId{st.args.at("prop")});
      } else if (st.kind == "closure") {
        trust_closure(net);
      } else if (st.kind == "propagate") {
        std::set<AgentId> audience;
        if (st.args.count("audience")) {
          audience = agent_list(st.args.at("audience"));
        } else {
          for (const auto& [id, _] : net.agents()) audience.insert(id);
        }
        propagate_assertion(net, AgentId{st.args.at("from")}, PropId{st.args.at("prop")}, audience);
      } else if (st.kind == "derive_security") {
        derive_security_ck(net, agent_list(st.args.at("clique")));
      } else if (st.kind == "event") {
        size_t dot = st.event_kind.find('.');
        if (dot != std::string::npos) {
          std::vector<Event> applied =
              run_preset_action(net, presets, st.event_kind.substr(0, dot),
                                st.event_kind.substr(dot + 1), st.args);
          for (Event& e : applied) out.event_log.push_back(std::move(e));
        } else {
          run_primitive(net, st.event_kind, st.args, &out.event_log);
        }
      }
    } catch (const IoError&) {
      throw;
    } catch (const EpinetError& e) {
      throw RunError(st.line, e.code(), e.what());
    }
    if (is_indexed) {
      ++events_seen;
      snapshots.push_back(net);
    }
  }

  for (const Statement* q : queries) {
    const Epinet* state = &net;
    if (q->query_at) {
      int at = *q->query_at;
      if (at < 0 || at > events_seen)
        throw RunError(q->line, ErrorCode::BadScope,
                       "query@" + std::to_string(at) + " but the scenario has " +
                           std::to_string(events_seen) + " events");
      if (!snapshots.empty()) state = &snapshots[static_cast<size_t>(at)];
    }
    try {
      out.report.queries.push_back(QueryResult{q->line, q->query_at, q->event_kind,
                                               eval_query(*state, *q)});
    } catch (const EpinetError& e) {
      throw RunError(q->line, e.code(), e.what());
    }
  }

  out.report.digest = digest(net);
  out.final_net = std::move(net);
  return out;
}

json eval_query_text(const Epinet& net, const std::string& query_line) {
  Scenario one = parse_scenario("query " + query_line + "\n");
  if (one.statements.size() != 1 || one.statements[0].kind != "query")
    throw EpinetError(ErrorCode::ParseError, "expected a single query");
  return eval_query(net, one.statements[0]);
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

void emit_nodes(std::ostringstream& out, const Epinet& net) {
  for (const auto& [id, a] : net.agents())
    out << "  \"" << dot_escape(id.value) << "\";\n";
}

std::string trust_edge_label(const TrustCell& cell) {
  std::vector<std::string> parts;
  auto name = [](const char* base, const std::optional<TrustOrigin>& o) {
    return std::string(base) + (*o == TrustOrigin::Derived ? "(d)" : "");
  };
  if (cell.integrity_weak) parts.push_back(name("integrity_weak", cell.integrity_weak));
  if (cell.integrity_strong) parts.push_back(name("integrity_strong", cell.integrity_strong));
  if (cell.competence) parts.push_back(name("competence", cell.competence));
  return joined(parts);
}

}  // namespace

std::string export_graph(const Epinet& net, const std::string& mode) {
  std::ostringstream out;
  if (mode == "agents_trust") {
    out << "digraph trust {\n  rankdir=LR;\n";
    emit_nodes(out, net);
    for (const auto& [key, cell] : net.trust_edges()) {
      if (cell.empty()) continue;
      out << "  \"" << dot_escape(key.first.value) << "\" -> \"" << dot_escape(key.second.value)
          << "\" [label=\"" << trust_edge_label(cell) << "\""
          << (cell.full() ? ",style=bold" : "") << "];\n";
    }
    out << "}\n";
    return out.str();
  }

  auto inner_arg = [&](const std::string& prefix) -> std::optional<std::string> {
    if (mode.rfind(prefix + "(", 0) != 0 || mode.back() != ')') return std::nullopt;
    return mode.substr(prefix.size() + 1, mode.size() - prefix.size() - 2);
  };

  if (auto arg = inner_arg("knowledge_p")) {
    PropId p{*arg};
    net.prop(p);
    out << "digraph knowledge {\n  rankdir=LR;\n";
    for (const auto& [id, a] : net.agents()) {
      StateLabels labels = net.epistemic_state(id, p);
      std::string tag;
      for (const std::string& s : labels.to_strings()) tag += tag.empty() ? s : "," + s;
      out << "  \"" << dot_escape(id.value) << "\" [label=\"" << dot_escape(id.value) << "\\n{"
          << tag << "}\"];\n";
    }
    for (const auto& [x, _] : net.agents())
      for (const auto& [y, __] : net.agents()) {
        if (x == y) continue;
        if (net.holds(Formula::knows(x, Formula::knows(y, Formula::atom(p)))))
          out << "  \"" << dot_escape(x.value) << "\" -> \"" << dot_escape(y.value)
              << "\" [label=\"k\"];\n";
      }
    out << "}\n";
    return out.str();
  }

  if (auto arg = inner_arg("neighborhoods")) {
    PropId p{*arg};
    net.prop(p);
    out << "digraph neighborhoods {\n  rankdir=LR;\n";
    emit_nodes(out, net);
    int cluster = 0;
    for (RegimeKind kind : {RegimeKind::Common, RegimeKind::Mutual, RegimeKind::Distributed}) {
      const char* label = kind == RegimeKind::Common ? "common"
                          : kind == RegimeKind::Mutual ? "mutual"
                                                       : "distributed";
      for (const Neighborhood& hood : find_neighborhoods(net, p, kind)) {
        out << "  subgraph cluster_" << cluster++ << " {\n    label=\"" << label << "\";\n";
        for (const AgentId& a : hood.members)
          out << "    \"" << dot_escape(a.value) << "\";\n";
        out << "  }\n";
      }
    }
    out << "}\n";
    return out.str();
  }

  if (auto arg = inner_arg("conduit")) {
    std::vector<std::string> parts = split_list(*arg);
    if (parts.size() != 4)
      throw EpinetError(ErrorCode::ParseError, "conduit(<from>,<to>,<kind>,<dir>)");
    ConduitKind kind = parts[2] == "security" ? ConduitKind::Security : ConduitKind::Trust;
    Directionality dir = parts[3] == "corridor" ? Directionality::Corridor : Directionality::OneWay;
    auto conduit = find_conduit(net, AgentId{parts[0]}, AgentId{parts[1]}, kind, dir);
    out << "digraph conduit {\n  rankdir=LR;\n";
    emit_nodes(out, net);
    for (const auto& [key, cell] : net.trust_edges())
      if (cell.full())
        out << "  \"" << dot_escape(key.first.value) << "\" -> \"" << dot_escape(key.second.value)
            << "\" [color=gray];\n";
    if (conduit)
      for (size_t i = 0; i + 1 < conduit->path.size(); ++i)
        out << "  \"" << dot_escape(conduit->path[i].value) << "\" -> \""
            << dot_escape(conduit->path[i + 1].value) << "\" [style=bold,label=\"conduit\"];\n";
    out << "}\n";
    return out.str();
  }

  throw EpinetError(ErrorCode::ParseError,
                    "unknown export mode '" + mode +
                        "' (expected agents_trust, knowledge_p(<prop>), neighborhoods(<prop>) "
                        "or conduit(...))");
}

}  // namespace epinet
