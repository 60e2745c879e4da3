#pragma once

// Goal-directed proof search: a fixed, non-backtracking strategy that either
// proves a goal or reports where it got stuck together with a decision trace.

#include <optional>
#include <string>
#include <vector>

#include "fitchmi/derivation.hpp"

namespace fitchmi {

struct EnvFact {
  std::string label;
  Formula formula;
  DerivationPtr derivation;
};

// Everything a search (or a fragment check) may use at some point of a proof.
struct SearchEnv {
  const Signature* signature = nullptr;
  Library library;
  std::vector<EnvFact> facts;          // innermost scope first
  std::vector<Binder> eigenvariables;  // outermost first
  std::vector<std::string> labels;     // every label in scope, for naming
};

enum class StepKind {
  PickedInduction,
  EnteredCase,
  SplitConjunction,
  ChoseDisjunct,
  AssumedPremise,
  InstantiatedExistential,
  TriedEnvMatch,
  CommittedRule,
  CommittedTheorem,
  DepthLimit,
  Failed,
};

std::string_view to_string(StepKind k);

struct TraceStep {
  StepKind kind = StepKind::Failed;
  int level = 0;           // induction nesting
  Formula goal;            // goal the step was taken on (metavariables resolved where known)
  std::string var;         // induction variable; assumed label; disjunct side
  std::string sort;
  std::string pattern;     // `S(m₁)` for a case entry
  std::vector<LabelledFormula> hypotheses;  // induction hypotheses of a case
  std::string name;        // rule / theorem / env fact label
  std::string detail;      // substitution or failure reason
};

// A goal search could not close, left for the user.
struct Hole {
  Formula goal;
  SearchEnv env;
  std::vector<TraceStep> trace;  // from the root goal down to this hole
  std::vector<LabelledFormula> hypotheses;  // induction hypotheses on the path
};

struct SearchOptions {
  int max_depth = 32;
  // Record failed induction cases (and a failed root) as holes instead of
  // failing the whole search.
  bool allow_holes = false;
};

struct SearchOutcome {
  enum class Kind { Proved, Partial, Stuck };
  Kind kind = Kind::Stuck;
  DerivationPtr derivation;  // Proved, or Partial with Gap nodes
  Substitution substitution;
  std::vector<TraceStep> trace;  // Stuck: path to the failing goal
  Formula stuck_goal;
  std::vector<Hole> holes;       // Partial: in depth-first order
  std::vector<TraceStep> log;    // every decision taken, in order
};

SearchOutcome search(const Formula& goal, const SearchEnv& env, SearchOptions opts = {});

// The textual form of a trace: numbered, indented induction and case entries.
std::string render_trace(const std::vector<TraceStep>& trace);

// The full prompt shown when search needs help with `goal`.
std::string render_prompt(const std::string& theorem, const std::vector<TraceStep>& trace, const Formula& goal);

// Smallest-index fresh names: `m₁`, `x₁`, `ind-hyp₁`, `h₁`, ...
std::string subscript(int n);
std::string fresh_indexed(const std::string& base, const std::vector<std::string>& taken);

}  // namespace fitchmi
