#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "epinet/scenario.hpp"
#include "epinet/serialize.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitEngine = 2;
constexpr int kExitIo = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw epinet::IoError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw epinet::IoError("cannot write " + path);
  out << content;
}

std::string dirname_of(const std::string& path) {
  size_t slash = path.find_last_of('/');
  return slash == std::string::npos ? std::string(".") : path.substr(0, slash);
}

struct ExportSpec {
  std::string mode;
  std::string path;
};

// --export dot:<mode>:<path>; the mode itself is colon-free.
ExportSpec parse_export_spec(const std::string& spec) {
  size_t first = spec.find(':');
  size_t last = spec.rfind(':');
  if (first == std::string::npos || first == last || spec.substr(0, first) != "dot")
    throw epinet::EpinetError(epinet::ErrorCode::ParseError,
                              "--export expects dot:<mode>:<path>");
  return ExportSpec{spec.substr(first + 1, last - first - 1), spec.substr(last + 1)};
}

int run_command(const std::string& file, bool pretty, const std::string& snapshot_path,
                const std::vector<std::string>& exports, const std::string& events_path,
                const std::string& presets_path) {
  std::string text = read_file(file);
  epinet::Scenario scenario = epinet::parse_scenario(text);

  epinet::RunOptions options;
  options.base_dir = dirname_of(file);
  epinet::PresetLibrary lib = epinet::PresetLibrary::builtin();
  if (!presets_path.empty()) lib = epinet::PresetLibrary::from_json_text(read_file(presets_path));
  options.presets = &lib;

  epinet::RunOutput out = epinet::run_scenario(scenario, options);
  std::cout << out.report.to_json().dump(2) << "\n";
  if (pretty) std::cerr << out.report.to_pretty();
  if (!snapshot_path.empty()) write_file(snapshot_path, epinet::snapshot(out.final_net));
  if (!events_path.empty()) {
    std::string lines;
    for (const epinet::Event& e : out.event_log) lines += epinet::event_to_json(e).dump() + "\n";
    write_file(events_path, lines);
  }
  for (const std::string& spec : exports) {
    ExportSpec ex = parse_export_spec(spec);
    write_file(ex.path, epinet::export_graph(out.final_net, ex.mode));
  }
  return kExitOk;
}

int query_command(const std::string& snapshot_path, const std::vector<std::string>& words) {
  epinet::Epinet net = epinet::load(read_file(snapshot_path));
  std::string query_line;
  for (const std::string& w : words) query_line += query_line.empty() ? w : " " + w;
  std::cout << epinet::eval_query_text(net, query_line).dump(2) << "\n";
  return kExitOk;
}

int check_command(const std::string& file) {
  epinet::parse_scenario(read_file(file));
  std::cout << "ok\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"epinet: epistemic network scenario runner"};
  app.require_subcommand(1);

  std::string run_file, snapshot_path, events_path, presets_path;
  bool pretty = false;
  std::vector<std::string> exports;
  CLI::App* run = app.add_subcommand("run", "run a scenario file and report query results");
  run->add_option("file", run_file, "scenario file")->required();
  run->add_flag("--pretty", pretty, "print a readable table to stderr");
  run->add_option("--snapshot", snapshot_path, "write the final net as canonical JSON");
  run->add_option("--export", exports, "dot:<mode>:<path> graph export (repeatable)");
  run->add_option("--events", events_path, "write the applied event log, one JSON object per line");
  run->add_option("--presets", presets_path, "extra preset document (JSON)");

  std::string query_snapshot;
  std::vector<std::string> query_words;
  CLI::App* query = app.add_subcommand("query", "evaluate one query against a snapshot");
  query->add_option("snapshot", query_snapshot, "snapshot JSON file")->required();
  query->add_option("query", query_words, "query, e.g. holds K(a,p)")->required();

  std::string check_file;
  CLI::App* check = app.add_subcommand("check", "parse a scenario file without running it");
  check->add_option("file", check_file, "scenario file")->required();

  try {
    app.parse(argc, argv);
    if (run->parsed())
      return run_command(run_file, pretty, snapshot_path, exports, events_path, presets_path);
    if (query->parsed()) return query_command(query_snapshot, query_words);
    if (check->parsed()) return check_command(check_file);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const epinet::ScenarioError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitParse;
  } catch (const epinet::RunError& e) {
    std::cerr << "engine error: " << e.what() << "\n";
    return kExitEngine;
  } catch (const epinet::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const epinet::EpinetError& e) {
    std::cerr << (e.code() == epinet::ErrorCode::ParseError ? "parse error: " : "engine error: ")
              << e.what() << "\n";
    return e.code() == epinet::ErrorCode::ParseError ? kExitParse : kExitEngine;
  } catch (const std::exception& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
