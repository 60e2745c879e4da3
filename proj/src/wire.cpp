#include "fitchmi/wire.hpp"

namespace fitchmi {

using nlohmann::json;

json term_ast(const Term& t) {
  switch (t.kind) {
    case TermKind::Rigid: return {{"var", t.name}, {"sort", t.sort}};
    case TermKind::Schematic: return {{"schematic", t.name}, {"sort", t.sort}};
    case TermKind::Meta: return {{"meta", t.meta}, {"sort", t.sort}};
    case TermKind::Ctor: {
      json args = json::array();
      for (const auto& a : t.args) args.push_back(term_ast(a));
      return {{"ctor", t.name}, {"sort", t.sort}, {"args", args}};
    }
  }
  return nullptr;
}

json formula_ast(const Formula& f) {
  json parts = json::array();
  for (const auto& p : f.parts) parts.push_back(formula_ast(p));
  switch (f.kind) {
    case Connective::Pred: {
      json args = json::array();
      for (const auto& a : f.args) args.push_back(term_ast(a));
      return {{"pred", f.name}, {"args", args}};
    }
    case Connective::And: return {{"op", "∧"}, {"parts", parts}};
    case Connective::Or: return {{"op", "∨"}, {"parts", parts}};
    case Connective::Implies: return {{"op", "⟹"}, {"parts", parts}};
    case Connective::Not: return {{"op", "¬"}, {"parts", parts}};
    case Connective::Forall: return {{"op", "∀"}, {"var", f.name}, {"sort", f.sort}, {"parts", parts}};
    case Connective::Exists: return {{"op", "∃"}, {"var", f.name}, {"sort", f.sort}, {"parts", parts}};
    case Connective::PropParam: return {{"prop", f.name}};
    case Connective::PropMeta: return {{"prop_meta", f.meta}};
    case Connective::Bottom: return {{"op", "⊥"}};
  }
  return nullptr;
}

json to_json(const TraceStep& s) {
  json hs = json::array();
  for (const auto& [l, f] : s.hypotheses) hs.push_back({{"label", l}, {"formula", to_string(f)}});
  json j = {{"kind", std::string(to_string(s.kind))}, {"level", s.level}, {"goal", to_string(s.goal)}};
  if (!s.var.empty()) j["var"] = s.var;
  if (!s.sort.empty()) j["sort"] = s.sort;
  if (!s.pattern.empty()) j["pattern"] = s.pattern;
  if (!hs.empty()) j["hypotheses"] = hs;
  if (!s.name.empty()) j["name"] = s.name;
  if (!s.detail.empty()) j["detail"] = s.detail;
  return j;
}

json to_json(const std::vector<TraceStep>& trace) {
  json a = json::array();
  for (const auto& s : trace) a.push_back(to_json(s));
  return a;
}

json to_json(const CheckError& e) {
  json j = {{"code", std::string(to_string(e.code))},
            {"message", e.message},
            {"line", e.pos.line},
            {"column", e.pos.column}};
  if (!e.label.empty()) j["label"] = e.label;
  if (!e.expected.empty()) j["expected"] = e.expected;
  if (!e.actual.empty()) j["actual"] = e.actual;
  if (!e.trace.empty()) j["trace"] = e.trace;
  return j;
}

json to_json(const Report& r) {
  json ts = json::array();
  for (const auto& t : r.theorems) {
    json j = {{"name", t.name}, {"verdict", t.proved ? "Proved" : "Failed"}, {"line", t.pos.line}};
    if (t.error) j["error"] = to_json(*t.error);
    ts.push_back(j);
  }
  return {{"ok", r.all_proved()}, {"theorems", ts}};
}

json to_json(const ParseError& e) {
  json j = {{"code", "ParseError"},
            {"kind", std::string(to_string(e.kind()))},
            {"message", e.message()},
            {"line", e.line()},
            {"column", e.column()}};
  if (!e.expected().empty()) j["expected"] = e.expected();
  return j;
}

json prompt_message(const std::string& session, const Prompt& p) {
  json hs = json::array();
  for (const auto& [l, f] : p.hypotheses) hs.push_back({{"label", l}, {"formula", to_string(f)}, {"ast", formula_ast(f)}});
  return {{"type", "prompt"},
          {"session", session},
          {"theorem", p.theorem},
          {"hole", p.hole},
          {"trace", to_json(p.trace)},
          {"trace_text", render_trace(p.trace)},
          {"text", p.text},
          {"goal", to_string(p.goal)},
          {"ast", formula_ast(p.goal)},
          {"hypotheses", hs}};
}

json done_message(const std::string& session, const Session& s) {
  json j = {{"type", "done"}, {"session", session}, {"phase", std::string(to_string(s.phase()))}};
  j["elaborated_gapped"] = s.elaborate_module(ElaborationMode::Gapped);
  j["elaborated_full"] = s.elaborate_module(ElaborationMode::Full);
  return j;
}

json error_message(const std::string& where, const std::string& message, int line, int column,
                   const std::string& code) {
  json j = {{"type", "error"}, {"where", where}, {"line", line}, {"column", column}, {"message", message}};
  if (!code.empty()) j["code"] = code;
  return j;
}

json failed_message(const std::string& session, const std::string& reason) {
  return {{"type", "failed"}, {"session", session}, {"reason", reason}};
}

json output_message(const std::string& session, const std::string& command, const std::string& text) {
  return {{"type", "output"}, {"session", session}, {"command", command}, {"text", text}};
}

std::string ModuleStore::add(const std::string& text) {
  parse_module(text);
  std::lock_guard<std::mutex> lock(mu_);
  std::string id = "m" + std::to_string(next_++);
  modules_[id] = text;
  return id;
}

std::optional<std::string> ModuleStore::find(const std::string& id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = modules_.find(id);
  if (it == modules_.end()) return std::nullopt;
  return it->second;
}

ProtocolConnection::ProtocolConnection(ModuleStore& store, std::optional<std::string> default_module, std::string id,
                                       Clock clock)
    : store_(store), default_module_(std::move(default_module)), id_(std::move(id)), clock_(std::move(clock)) {}

std::vector<json> ProtocolConnection::handle(const std::string& raw) {
  json msg;
  try {
    msg = json::parse(raw);
  } catch (const json::parse_error& e) {
    return {error_message("protocol", std::string("malformed JSON: ") + e.what())};
  }
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string())
    return {error_message("protocol", "a message is an object with a string `type'")};
  std::string type = msg["type"];
  try {
    if (type == "start") return start(msg);
    if (!session_) return {error_message("protocol", "no session; send `start' first")};
    if (type == "fragment") {
      if (!msg.contains("text") || !msg["text"].is_string())
        return {error_message("protocol", "`fragment' needs a string `text'")};
      if (session_->phase() != Phase::AwaitingUser) return {error_message("protocol", "the session is not awaiting input")};
      return after_submit(session_->submit(UserResponse::fragment(msg["text"])), "");
    }
    if (type == "command") {
      if (!msg.contains("name") || !msg["name"].is_string())
        return {error_message("protocol", "`command' needs a string `name'")};
      std::string name = msg["name"];
      auto c = command_from_name(name);
      if (!c) return {error_message("command", "unknown command `" + name + "'", 0, 0, "UnknownCommand")};
      if (session_->phase() != Phase::AwaitingUser) return {error_message("protocol", "the session is not awaiting input")};
      return after_submit(session_->submit(UserResponse::command(*c)), name);
    }
  } catch (const json::exception& e) {
    return {error_message("protocol", e.what())};
  }
  return {error_message("protocol", "unknown message type `" + type + "'")};
}

std::vector<json> ProtocolConnection::start(const json& msg) {
  if (!msg.contains("theorem") || !msg["theorem"].is_string())
    return {error_message("protocol", "`start' needs a string `theorem'")};
  std::string text;
  if (msg.contains("module") && msg["module"].is_string()) {
    std::string m = msg["module"];
    text = store_.find(m).value_or(m);
  } else if (default_module_) {
    text = *default_module_;
  } else {
    return {error_message("protocol", "`start' needs a `module' (text or uploaded id)")};
  }
  ModuleAST module;
  try {
    module = parse_module(text);
  } catch (const ParseError& e) {
    return {error_message("module", e.message(), e.line(), e.column(), "ParseError")};
  }
  std::string theorem = msg["theorem"];
  if (!module.find_theorem(theorem)) return {error_message("start", "no theorem named `" + theorem + "'")};
  SessionOptions o;
  o.clock = clock_;
  if (msg.contains("max_depth")) {
    if (!msg["max_depth"].is_number_integer() || msg["max_depth"].get<int>() < 0)
      return {error_message("protocol", "`max_depth' must be a non-negative integer")};
    o.max_depth = msg["max_depth"];
  }
  session_ = std::make_unique<Session>(module, theorem, o);
  return state_message();
}

std::vector<json> ProtocolConnection::after_submit(const SubmitResult& r, const std::string& command) {
  if (r.error) {
    const FragmentError& e = *r.error;
    json j = error_message(command.empty() ? "fragment" : "command", e.message, e.line, e.column, e.code);
    if (!e.label.empty()) j["label"] = e.label;
    return {j};
  }
  if (command == "context" || command == "trace") return {output_message(id_, command, r.output)};
  return state_message();
}

std::vector<json> ProtocolConnection::state_message() {
  switch (session_->phase()) {
    case Phase::AwaitingUser:
      return {prompt_message(id_, *session_->prompt())};
    case Phase::Done:
    case Phase::DoneWithGaps:
      return {done_message(id_, *session_)};
    case Phase::Failed: {
      std::string reason = "failed";
      const auto& t = session_->transcript();
      for (auto it = t.rbegin(); it != t.rend(); ++it)
        if (it->type == "failed") {
          reason = it->payload.value("reason", reason);
          break;
        }
      return {failed_message(id_, reason)};
    }
  }
  return {};
}

}  // namespace fitchmi
