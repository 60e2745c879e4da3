#pragma once

// Module and proof syntax: AST, parser and pretty-printer.
//
// A proof is a Fitch block. Nesting is given by the number of leading `|`
// characters on each line; a run of three or more `-` right after the last
// bar separates a subproof's (or case's) assumptions from its body.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fitchmi/kernel.hpp"

namespace fitchmi {

// Positions never take part in structural equality.
struct SourcePos {
  int line = 0;
  int column = 0;
  bool operator==(const SourcePos&) const { return true; }
};

enum class BuiltinRule {
  AndIntro,
  AndElim,
  OrIntro,
  OrElim,
  ImpIntro,
  ImpElim,
  NotIntro,
  NotElim,
  BotElim,
  ForallIntro,
  ForallElim,
  ExistsIntro,
  ExistsElim,
};

inline constexpr BuiltinRule kAllBuiltins[] = {
    BuiltinRule::AndIntro,    BuiltinRule::AndElim,    BuiltinRule::OrIntro,     BuiltinRule::OrElim,
    BuiltinRule::ImpIntro,    BuiltinRule::ImpElim,    BuiltinRule::NotIntro,    BuiltinRule::NotElim,
    BuiltinRule::BotElim,     BuiltinRule::ForallIntro, BuiltinRule::ForallElim, BuiltinRule::ExistsIntro,
    BuiltinRule::ExistsElim,
};

std::string_view builtin_name(BuiltinRule r);  // e.g. "∀-elim"
std::optional<BuiltinRule> builtin_from_name(std::string_view name);

struct Ref {
  std::string label;
  SourcePos pos;
  bool operator==(const Ref&) const = default;
};

struct Step;
using Block = std::vector<Step>;

struct Hypothesis {
  std::string label;
  Formula formula;
  SourcePos pos;
  bool operator==(const Hypothesis&) const = default;
};

// `case S(m₁) ->` for induction and case analysis on a term, or
// `case rule sum-s (k : ℕ) ->` for case analysis on a judgment fact.
struct Case {
  std::string name;
  bool by_rule = false;
  std::vector<Binder> vars;
  std::vector<Hypothesis> hypotheses;
  Block body;
  SourcePos pos;
};

enum class JustKind { Rule, Theorem, BuiltIn, Induction, CaseAnalysis, Prove };

struct Justification {
  JustKind kind = JustKind::Prove;
  std::string name;  // rule or theorem
  BuiltinRule builtin = BuiltinRule::AndIntro;
  std::vector<Ref> refs;
  std::optional<Term> scrutinee;  // case analysis on an eigenvariable
  std::optional<Ref> fact;        // case analysis on a labelled judgment
  std::vector<Case> cases;
};

enum class AssumptionKind { Hypothesis, ForAny, ForSome };

struct Assumption {
  AssumptionKind kind = AssumptionKind::Hypothesis;
  std::string label;
  Formula formula;            // unused for ForAny
  std::vector<Binder> vars;   // ForAny / ForSome
  SourcePos pos;
  bool operator==(const Assumption&) const = default;
};

struct Line {
  std::string label;
  Formula formula;
  Justification just;
  SourcePos pos;
};

struct Subproof {
  std::string label;
  std::vector<Assumption> assumptions;
  Block body;
  SourcePos pos;
};

struct Step {
  std::variant<Line, Subproof> node;

  bool is_line() const { return std::holds_alternative<Line>(node); }
  const Line& line() const { return std::get<Line>(node); }
  Line& line() { return std::get<Line>(node); }
  const Subproof& subproof() const { return std::get<Subproof>(node); }
  Subproof& subproof() { return std::get<Subproof>(node); }
  const std::string& label() const;
  SourcePos pos() const;
};

bool operator==(const Case& a, const Case& b);
bool operator==(const Justification& a, const Justification& b);
bool operator==(const Line& a, const Line& b);
bool operator==(const Subproof& a, const Subproof& b);
bool operator==(const Step& a, const Step& b);

struct DataDecl {
  std::string name;
  std::vector<ConstructorSig> constructors;
  SourcePos pos;
  bool operator==(const DataDecl&) const = default;
};

struct RuleDecl {
  std::string name;
  std::vector<Binder> params;  // schematic variables
  std::vector<Formula> premises;
  Formula conclusion;
  SourcePos pos;
  bool operator==(const RuleDecl&) const = default;
};

struct TheoremDecl {
  std::string name;
  bool schema = false;
  std::vector<std::string> prop_params;
  std::vector<Binder> params;  // schematic variables; eigenvariables inside the proof
  std::vector<Formula> premises;
  bool turnstile = false;
  Formula conclusion;
  Block proof;
  SourcePos pos;
  bool operator==(const TheoremDecl&) const = default;

  // P₁ ⟹ … ⟹ Pₙ ⟹ C
  Formula target() const;
};

using Decl = std::variant<DataDecl, RuleDecl, TheoremDecl>;

struct ModuleAST {
  std::vector<Decl> decls;
  Signature signature;  // derived while parsing; not part of equality

  bool operator==(const ModuleAST& other) const { return decls == other.decls; }
  const TheoremDecl* find_theorem(std::string_view name) const;
};

enum class ParseErrorKind { Syntax, DuplicateName, UnknownIdentifier };

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, int line, int column, std::string message, std::vector<std::string> expected = {});

  ParseErrorKind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }
  const std::vector<std::string>& expected() const { return expected_; }
  const std::string& message() const { return message_; }

 private:
  ParseErrorKind kind_;
  int line_;
  int column_;
  std::string message_;
  std::vector<std::string> expected_;
};

std::string_view to_string(ParseErrorKind k);

ModuleAST parse_module(std::string_view text);

// Names a fragment may use without declaring them itself.
struct FragmentScope {
  std::vector<Binder> eigenvariables;
  std::vector<std::string> labels;
  std::vector<std::string> propositions;
};

Block parse_fragment(std::string_view text, const Signature& sig, const FragmentScope& scope = {});

// Parses a single formula; free identifiers resolve to `eigenvariables`.
Formula parse_formula(std::string_view text, const Signature& sig, const std::vector<Binder>& eigenvariables = {});

std::string pretty_print(const Formula& f);
std::string pretty_print(const Block& block, const std::string& prefix = "");
std::string pretty_print(const Decl& decl);
std::string pretty_print(const ModuleAST& module);

// Labels renamed to their definition order, so that two scripts differing
// only in label names compare equal.
Block normalize_labels(const Block& block);

}  // namespace fitchmi
