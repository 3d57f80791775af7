#ifndef EPINET_SCENARIO_HPP
#define EPINET_SCENARIO_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "epinet/epinet.hpp"
#include "epinet/errors.hpp"
#include "epinet/platform.hpp"

namespace epinet {

// Parse failure with source coordinates; the message lists what was expected.
class ScenarioError : public EpinetError {
 public:
  ScenarioError(int line, int col, const std::string& message)
      : EpinetError(ErrorCode::ParseError,
                    "line " + std::to_string(line) + ", col " + std::to_string(col) + ": " +
                        message),
        line_(line),
        col_(col) {}

  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

// Engine failure while executing a scenario, tagged with the source line.
class RunError : public EpinetError {
 public:
  RunError(int line, ErrorCode code, const std::string& message)
      : EpinetError(code, "line " + std::to_string(line) + ": " + message), line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One line of a scenario file. Declarations and mutations share this loose
// shape; the parser guarantees the fields each keyword needs are present.
struct Statement {
  int line = 0;
  std::string kind;
  std::vector<std::string> positional;
  std::map<std::string, std::string> args;
  std::string quoted;
  std::string event_kind;            // for kind == "event"
  std::optional<int> query_at;       // for kind == "query"

  // structural equality; source position does not participate
  bool operator==(const Statement& other) const {
    return kind == other.kind && positional == other.positional && args == other.args &&
           quoted == other.quoted && event_kind == other.event_kind && query_at == other.query_at;
  }
};

struct Scenario {
  std::vector<Statement> statements;

  bool operator==(const Scenario&) const = default;
};

Scenario parse_scenario(const std::string& text);
std::string print_scenario(const Scenario& scenario);

struct QueryResult {
  int line = 0;
  std::optional<int> at;
  std::string kind;
  nlohmann::json result;
};

struct Report {
  std::vector<QueryResult> queries;
  std::string digest;

  nlohmann::json to_json() const;
  std::string to_pretty() const;
};

struct RunOptions {
  const PresetLibrary* presets = nullptr;  // defaults to the builtin catalog
  std::string base_dir;                    // resolves import_trust paths
};

struct RunOutput {
  Report report;
  Epinet final_net;
  std::vector<Event> event_log;
};

RunOutput run_scenario(const Scenario& scenario, const RunOptions& options = {});

// Evaluates one query statement against an existing net (the CLI's
// `epinet query` entry point).
nlohmann::json eval_query_text(const Epinet& net, const std::string& query_line);

// DOT export. mode is one of:
//   agents_trust
//   knowledge_p(<prop>)
//   neighborhoods(<prop>)
//   conduit(<from>,<to>,trust|security,one_way|corridor)
std::string export_graph(const Epinet& net, const std::string& mode);

}  // namespace epinet

#endif
