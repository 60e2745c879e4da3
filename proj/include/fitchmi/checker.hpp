#pragma once

// Checking mode: every line states its formula and the checker verifies its
// justification, producing a Derivation that the validator can re-check.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fitchmi/derivation.hpp"
#include "fitchmi/search.hpp"
#include "fitchmi/surface.hpp"

namespace fitchmi {

enum class CheckCode {
  UnknownLabel,
  LabelNotVisible,
  NotASubproof,
  WrongArity,
  ShapeMismatch,
  UnificationClash,
  OccursCheck,
  SortMismatch,
  FreshnessViolation,
  EigenvariableEscape,
  MissingCase,
  DuplicateCase,
  ImpossibleCase,
  WrongCaseResult,
  UnknownConstructor,
  NotUniversal,
  ScrutineeNotInScope,
  SearchStuck,
  AutoDisabled,
  UnknownRule,
  UnknownTheorem,
  ResultMismatch,
  DuplicateLabel,
  UnresolvedSchematic,
  EmptyBlock,
  InvalidDerivation,
};

std::string_view to_string(CheckCode c);

struct CheckError {
  CheckCode code = CheckCode::ShapeMismatch;
  std::string message;
  SourcePos pos;
  std::string label;
  std::string expected;  // pretty-printed pattern, when there is one
  std::string actual;
  std::string trace;     // rendered search trace for SearchStuck
};

// Services `prove` lines. Returns a complete derivation of the goal, or
// nothing together with an explanation.
struct ProveResult {
  DerivationPtr derivation;
  std::string failure;
};
using SearchHook = std::function<ProveResult(const Formula& goal, const SearchEnv& env)>;

SearchHook default_search_hook(int max_depth = 32);

struct CheckOptions {
  SearchHook search;            // empty: `prove` lines are errors
  bool assume_failed = false;   // later theorems may cite failed ones
};

struct TheoremReport {
  std::string name;
  bool proved = false;
  DerivationPtr derivation;
  std::optional<CheckError> error;
  SourcePos pos;
};

struct Report {
  std::vector<TheoremReport> theorems;
  bool all_proved() const;
};

Report check_module(const ModuleAST& module, const CheckOptions& opts);

// Library visible to the theorem `name`: rules declared before it and
// earlier theorems (only proved ones unless `failed` lists are ignored).
Library library_before(const ModuleAST& module, std::string_view name, const Report* report = nullptr,
                       bool assume_failed = false);

struct BlockResult {
  Formula result;
  DerivationPtr derivation;
  std::optional<CheckError> error;
};

// Checks a block (a user fragment) in the context `env`; env facts may be
// cited by label.
BlockResult check_block(const Block& block, const SearchEnv& env, const CheckOptions& opts);

}  // namespace fitchmi
