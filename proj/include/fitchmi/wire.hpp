#pragma once

// JSON forms of reports, traces and protocol messages, and the transport
// independent side of the session protocol.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fitchmi/checker.hpp"
#include "fitchmi/session.hpp"

namespace fitchmi {

nlohmann::json term_ast(const Term& t);
nlohmann::json formula_ast(const Formula& f);
nlohmann::json to_json(const TraceStep& s);
nlohmann::json to_json(const std::vector<TraceStep>& trace);
nlohmann::json to_json(const CheckError& e);
nlohmann::json to_json(const Report& r);
nlohmann::json to_json(const ParseError& e);

// server → client
nlohmann::json prompt_message(const std::string& session, const Prompt& p);
nlohmann::json done_message(const std::string& session, const Session& s);
nlohmann::json error_message(const std::string& where, const std::string& message, int line = 0, int column = 0,
                             const std::string& code = "");
nlohmann::json failed_message(const std::string& session, const std::string& reason);
nlohmann::json output_message(const std::string& session, const std::string& command, const std::string& text);

// Uploaded modules, shared by every connection.
class ModuleStore {
 public:
  // Parses `text`; throws ParseError. Returns the new module id.
  std::string add(const std::string& text);
  std::optional<std::string> find(const std::string& id) const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::string> modules_;
  int next_ = 1;
};

// One client connection: at most one session at a time, messages handled in
// arrival order.
class ProtocolConnection {
 public:
  ProtocolConnection(ModuleStore& store, std::optional<std::string> default_module, std::string id,
                     Clock clock = {});

  // Handles one client message; returns the replies in order. Malformed
  // input yields a protocol error and leaves the connection usable.
  std::vector<nlohmann::json> handle(const std::string& raw);

  const Session* session() const { return session_.get(); }

 private:
  std::vector<nlohmann::json> start(const nlohmann::json& msg);
  std::vector<nlohmann::json> after_submit(const SubmitResult& r, const std::string& command);
  std::vector<nlohmann::json> state_message();

  ModuleStore& store_;
  std::optional<std::string> default_module_;
  std::string id_;
  Clock clock_;
  std::unique_ptr<Session> session_;
};

}  // namespace fitchmi
