#pragma once

// Mixed-initiative proving of one theorem: search runs first, and every goal
// it cannot close is handed to the user as a prompt. Accepted fragments are
// grafted into the search derivation.

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "fitchmi/checker.hpp"
#include "fitchmi/search.hpp"
#include "fitchmi/surface.hpp"

namespace fitchmi {

enum class Phase { AwaitingUser, Done, DoneWithGaps, Failed };

std::string_view to_string(Phase p);

struct Prompt {
  std::string theorem;
  std::size_t hole = 0;  // index into the session's holes
  Formula goal;
  std::vector<TraceStep> trace;
  std::vector<LabelledFormula> hypotheses;  // induction hypotheses in scope
  std::string text;                          // rendered prompt
};

enum class Command { Context, Trace, Abort, Skip };

std::optional<Command> command_from_name(std::string_view name);
std::string_view to_string(Command c);

struct UserResponse {
  enum class Kind { Fragment, Command };
  Kind kind = Kind::Fragment;
  std::string text;  // fragment source or command name

  static UserResponse fragment(std::string text) { return {Kind::Fragment, std::move(text)}; }
  static UserResponse command(Command c) { return {Kind::Command, std::string(to_string(c))}; }
};

// Why a fragment was not accepted. Line and column are relative to the fragment.
struct FragmentError {
  std::string code;  // a CheckCode name, or "ParseError" / "UnknownCommand"
  std::string message;
  int line = 0;
  int column = 0;
  std::string label;
};

struct SubmitResult {
  bool accepted = false;  // fragment accepted or command carried out
  std::optional<FragmentError> error;
  std::string output;  // text answer to `context` / `trace`
};

struct TranscriptEvent {
  std::string type;
  std::string timestamp;
  nlohmann::json payload;
};

using Clock = std::function<std::string()>;

// Current UTC time as `2026-01-31T12:00:00.000Z`.
std::string utc_now();

// `start + n` seconds for the n-th call, for reproducible transcripts.
Clock fixed_clock(std::string start = "2000-01-01T00:00:00Z");

struct SessionOptions {
  int max_depth = 32;
  Clock clock;  // empty: utc_now
};

enum class ElaborationMode { Gapped, Full };

std::optional<ElaborationMode> elaboration_mode_from_name(std::string_view name);

class Session {
 public:
  // Proves `theorem` of `module`, using the rules and theorems declared before it.
  // Throws std::invalid_argument when there is no such theorem.
  Session(const ModuleAST& module, const std::string& theorem, SessionOptions opts = {});
  // Proves `goal` in `env` (no module to elaborate into).
  Session(SearchEnv env, Formula goal, std::string name, SessionOptions opts = {});

  Phase phase() const { return phase_; }
  const std::optional<Prompt>& prompt() const { return prompt_; }
  SubmitResult submit(const UserResponse& response);

  const std::vector<TranscriptEvent>& transcript() const { return transcript_; }
  const std::vector<Hole>& holes() const { return holes_; }
  const std::string& theorem() const { return name_; }
  const Formula& goal() const { return goal_; }
  const SearchEnv& env() const { return env_; }

  // The whole derivation once Done / DoneWithGaps; skipped holes stay gaps.
  DerivationPtr derivation() const;

  // Proof script for the theorem, and a module that re-checks it.
  Block elaborate(ElaborationMode mode) const;
  std::string elaborate_module(ElaborationMode mode) const;

 private:
  struct Fill {
    bool skipped = false;
    Block fragment;
    DerivationPtr derivation;
    std::map<std::string, DerivationPtr> proved;  // `prove` lines of the fragment
  };

  void start();
  void record(const std::string& type, nlohmann::json payload);
  void open_prompt();
  void advance();
  SubmitResult run_command(Command c);
  SubmitResult submit_fragment(const std::string& text);

  std::shared_ptr<const ModuleAST> module_;
  std::string name_;
  std::vector<std::string> props_;
  SearchEnv env_;
  Formula goal_;
  SessionOptions opts_;
  Clock clock_;

  Phase phase_ = Phase::Failed;
  DerivationPtr skeleton_;
  std::vector<Hole> holes_;
  std::vector<Fill> fills_;
  std::size_t current_ = 0;
  std::optional<Prompt> prompt_;
  std::vector<TranscriptEvent> transcript_;
};

// Key under which a `prove` line's derivation is recorded.
std::string prove_key(const Formula& goal, const std::vector<Binder>& eigenvariables);

struct HoleFill {
  bool skipped = false;
  const Block* fragment = nullptr;
  DerivationPtr derivation;
  const std::map<std::string, DerivationPtr>* proved = nullptr;
};

// Rebuilds a proof script from a search derivation whose gaps (in depth-first
// order) are closed by `fills`.
Block elaborate_derivation(const DerivationPtr& skeleton, const std::vector<HoleFill>& fills, ElaborationMode mode,
                           const std::vector<Binder>& eigenvariables);

// `module` up to `theorem`, followed by the theorem with `proof` as its proof.
ModuleAST replace_proof(const ModuleAST& module, const std::string& theorem, const Block& proof);

// Responses recorded in a transcript, in order.
std::vector<UserResponse> responses_of(const std::vector<TranscriptEvent>& transcript);

nlohmann::json to_json(const TranscriptEvent& e);
TranscriptEvent event_from_json(const nlohmann::json& j);
std::string transcript_to_jsonl(const std::vector<TranscriptEvent>& events);
std::vector<TranscriptEvent> transcript_from_jsonl(std::string_view text);

}  // namespace fitchmi
