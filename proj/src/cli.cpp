#include "fitchmi/cli.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include "CLI11.hpp"

#include "fitchmi/server.hpp"
#include "fitchmi/wire.hpp"

namespace fitchmi {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<std::string> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_file(const std::string& path, const std::string& text, std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) {
    err << path << ": cannot write\n";
    return false;
  }
  return true;
}

struct Loaded {
  std::optional<ModuleAST> module;
  int code = kExitOk;
};

Loaded load(const std::string& path, bool json, std::ostream& out, std::ostream& err) {
  Loaded l;
  auto text = slurp(path);
  if (!text) {
    if (json)
      out << nlohmann::json{{"ok", false}, {"file", path}, {"error", {{"code", "FileNotFound"}, {"message", "file not found"}}}}.dump(2) << "\n";
    else
      err << path << ": file not found\n";
    l.code = kExitParse;
    return l;
  }
  try {
    l.module = parse_module(*text);
  } catch (const ParseError& e) {
    if (json)
      out << nlohmann::json{{"ok", false}, {"file", path}, {"error", to_json(e)}}.dump(2) << "\n";
    else
      err << path << ":" << e.line() << ":" << e.column() << ": error: " << e.message() << "\n";
    l.code = kExitParse;
  }
  return l;
}

void print_error(std::ostream& out, const CheckError& e) {
  out << "  line " << e.pos.line << ", column " << e.pos.column;
  if (!e.label.empty()) out << " (label " << e.label << ")";
  out << ": " << to_string(e.code) << ": " << e.message << "\n";
  if (!e.expected.empty()) out << "    expected: " << e.expected << "\n";
  if (!e.actual.empty()) out << "    actual:   " << e.actual << "\n";
  if (!e.trace.empty()) {
    std::istringstream in(e.trace);
    std::string line;
    while (std::getline(in, line)) out << "    " << line << "\n";
  }
}

struct CheckArgs {
  std::string path;
  bool no_auto = false;
  int max_depth = 32;
  std::string diagnostics = "text";
  bool assume_failed = false;
};

int cmd_check(const CheckArgs& a, std::ostream& out, std::ostream& err) {
  bool json = a.diagnostics == "json";
  Loaded l = load(a.path, json, out, err);
  if (!l.module) return l.code;
  CheckOptions o;
  if (!a.no_auto) o.search = default_search_hook(a.max_depth);
  o.assume_failed = a.assume_failed;
  Report r = check_module(*l.module, o);
  if (json) {
    nlohmann::json j = to_json(r);
    j["file"] = a.path;
    out << j.dump(2) << "\n";
  } else {
    for (const auto& t : r.theorems) {
      out << t.name << ": " << (t.proved ? "Proved" : "Failed") << "\n";
      if (t.error) print_error(out, *t.error);
    }
  }
  return r.all_proved() ? kExitOk : kExitFailed;
}

struct ProveArgs {
  std::string path;
  std::string theorem;
  std::string script;
  std::string replay;
  std::string elaborate;
  std::string out;
  std::string transcript;
  int max_depth = 32;
  bool wall_clock = false;
};

ModuleAST prefix_of(const ModuleAST& m, const std::string& theorem) {
  ModuleAST p;
  p.signature = m.signature;
  for (const auto& d : m.decls) {
    if (const auto* t = std::get_if<TheoremDecl>(&d); t && t->name == theorem) break;
    p.decls.push_back(d);
  }
  return p;
}

int cmd_prove(const ProveArgs& a, std::istream& in, std::ostream& out, std::ostream& err) {
  Loaded l = load(a.path, false, out, err);
  if (!l.module) return l.code;
  const ModuleAST& m = *l.module;
  if (!m.find_theorem(a.theorem)) {
    err << a.path << ": no theorem named " << a.theorem << "\n";
    return kExitUsage;
  }
  CheckOptions co;
  co.search = default_search_hook(a.max_depth);
  Report before = check_module(prefix_of(m, a.theorem), co);
  for (const auto& t : before.theorems) {
    if (t.proved) continue;
    err << a.path << ": " << t.name << " does not check, so " << a.theorem << " cannot be proved after it\n";
    if (t.error) print_error(err, *t.error);
    return kExitFailed;
  }

  std::optional<ElaborationMode> mode;
  if (!a.elaborate.empty()) mode = elaboration_mode_from_name(a.elaborate);

  std::ifstream script_file;
  std::istringstream replayed;
  std::istream* source = &in;
  bool scripted = !a.script.empty() || !a.replay.empty();
  std::vector<UserResponse> replay;
  if (!a.script.empty()) {
    script_file.open(a.script, std::ios::binary);
    if (!script_file) {
      err << a.script << ": file not found\n";
      return kExitParse;
    }
    source = &script_file;
  }
  if (!a.replay.empty()) {
    auto text = slurp(a.replay);
    if (!text) {
      err << a.replay << ": file not found\n";
      return kExitParse;
    }
    try {
      replay = responses_of(transcript_from_jsonl(*text));
    } catch (const std::exception& e) {
      err << a.replay << ": not a transcript: " << e.what() << "\n";
      return kExitParse;
    }
  }

  SessionOptions so;
  so.max_depth = a.max_depth;
  if (scripted && !a.wall_clock) so.clock = fixed_clock();
  Session s(m, a.theorem, so);
  std::size_t next_replay = 0;
  std::optional<std::size_t> shown;
  int code = kExitOk;

  while (s.phase() == Phase::AwaitingUser) {
    if (shown != s.prompt()->hole) {
      out << s.prompt()->text << std::flush;
      shown = s.prompt()->hole;
    } else {
      out << "Type a command or a proof:\n" << std::flush;
    }
    std::optional<UserResponse> r;
    if (!a.replay.empty()) {
      if (next_replay < replay.size()) r = replay[next_replay++];
    } else {
      r = read_response(*source);
    }
    if (!r) {
      out << (scripted ? "input ended while a response was expected\n" : "end of input; aborting\n");
      code = kExitFailed;
      break;
    }
    SubmitResult res = s.submit(*r);
    if (!res.output.empty()) out << res.output;
    if (res.error) {
      const FragmentError& e = *res.error;
      out << "error";
      if (e.line > 0) out << ": line " << e.line << ", column " << e.column;
      if (!e.label.empty()) out << " (label " << e.label << ")";
      out << ": " << e.code << ": " << e.message << "\n";
      if (scripted && e.code == "ParseError") {
        code = kExitFailed;
        break;
      }
    }
  }

  if (!a.transcript.empty() && !write_file(a.transcript, transcript_to_jsonl(s.transcript()), err)) return kExitFailed;
  if (code != kExitOk) return code;

  if (s.phase() == Phase::Failed) {
    std::string reason = "failed";
    for (auto it = s.transcript().rbegin(); it != s.transcript().rend(); ++it)
      if (it->type == "failed") {
        reason = it->payload.value("reason", reason);
        break;
      }
    out << "Failed: " << reason << "\n";
    return kExitFailed;
  }
  out << (s.phase() == Phase::Done ? "Proved " : "Proved with gaps ") << a.theorem << "\n";
  ElaborationMode em = mode.value_or(ElaborationMode::Gapped);
  if (!a.out.empty()) {
    if (!write_file(a.out, s.elaborate_module(em), err)) return kExitFailed;
  } else if (mode) {
    out << pretty_print(s.elaborate(em));
  }
  return kExitOk;
}

struct ServeArgs {
  unsigned short port = 7414;
  std::string address = "127.0.0.1";
  std::string module;
  std::string static_dir;
};

int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
  ServeOptions o;
  o.port = a.port;
  o.address = a.address;
  o.static_dir = a.static_dir;
  o.log = &err;
  if (!a.module.empty()) {
    auto text = slurp(a.module);
    if (!text) {
      err << a.module << ": file not found\n";
      return kExitParse;
    }
    try {
      parse_module(*text);
    } catch (const ParseError& e) {
      err << a.module << ":" << e.line() << ":" << e.column() << ": error: " << e.message() << "\n";
      return kExitParse;
    }
    o.module_text = *text;
  }
  try {
    Server server(o);
    out << "listening on http://" << a.address << ":" << server.port() << std::endl;
    server.run();
  } catch (const std::exception& e) {
    err << e.what() << "\n";
    return kExitFailed;
  }
  return kExitOk;
}

}  // namespace

std::optional<UserResponse> read_response(std::istream& in) {
  static const std::regex word("[a-z]+");
  std::string line;
  while (std::getline(in, line)) {
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) return std::nullopt;
  if (std::regex_match(trim(line), word)) return UserResponse{UserResponse::Kind::Command, trim(line)};
  std::string text = line + "\n";
  while (std::getline(in, line)) {
    if (trim(line) == ".") break;
    text += line + "\n";
  }
  return UserResponse::fragment(text);
}

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fitch-style proof checker with mixed-initiative search", "fitch-mi"};
  app.require_subcommand(1);

  CheckArgs ca;
  auto* check = app.add_subcommand("check", "check every theorem of a module");
  check->add_option("file", ca.path, "module file")->required();
  check->add_flag("--no-auto", ca.no_auto, "reject `prove' justifications");
  check->add_option("--max-depth", ca.max_depth, "search depth limit")->check(CLI::NonNegativeNumber);
  check->add_option("--diagnostics", ca.diagnostics, "text or json")->check(CLI::IsMember({"text", "json"}));
  check->add_flag("--assume-failed", ca.assume_failed, "let later theorems cite failed ones");

  ProveArgs pa;
  auto* prove = app.add_subcommand("prove", "prove a theorem with search and user guidance");
  prove->add_option("file", pa.path, "module file")->required();
  prove->add_option("theorem", pa.theorem, "theorem name")->required();
  auto* script = prove->add_option("--script", pa.script, "read responses from a file");
  prove->add_option("--replay", pa.replay, "replay the responses of a transcript")->excludes(script);
  prove->add_option("--elaborate", pa.elaborate, "full or gapped")->check(CLI::IsMember({"full", "gapped"}));
  prove->add_option("--out", pa.out, "write the elaborated module here");
  prove->add_option("--transcript", pa.transcript, "write the session transcript (JSON lines) here");
  prove->add_option("--max-depth", pa.max_depth, "search depth limit")->check(CLI::NonNegativeNumber);
  prove->add_flag("--wall-clock", pa.wall_clock, "real timestamps even when scripted");

  ServeArgs sa;
  auto* serve = app.add_subcommand("serve", "serve the session protocol over WebSocket");
  serve->add_option("--port", sa.port, "TCP port");
  serve->add_option("--address", sa.address, "address to bind");
  serve->add_option("--module", sa.module, "module used by sessions that do not upload one");
  serve->add_option("--static", sa.static_dir, "directory served at /");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "fitch-mi: " << e.what() << "\n" << "run `fitch-mi --help' for usage\n";
    return kExitUsage;
  }
  if (check->parsed()) return cmd_check(ca, out, err);
  if (prove->parsed()) return cmd_prove(pa, in, out, err);
  return cmd_serve(sa, out, err);
}

}  // namespace fitchmi
