#pragma once

// Proof trees produced by the checker and by search, plus an independent
// node-local validator for them.

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fitchmi/kernel.hpp"
#include "fitchmi/surface.hpp"

namespace fitchmi {

// A rule or theorem statement: premises ⊢ conclusion over schematic
// variables `params` and proposition parameters `props`.
struct Schema {
  std::string name;
  std::vector<Binder> params;
  std::vector<std::string> props;
  std::vector<Formula> premises;
  Formula conclusion;
};

Schema schema_of(const RuleDecl& r);
Schema schema_of(const TheoremDecl& t);

// Rules and theorems visible at some point of a module, in declaration order.
struct Library {
  std::vector<Schema> rules;
  std::vector<Schema> theorems;

  const Schema* find_rule(std::string_view name) const;
  const Schema* find_theorem(std::string_view name) const;
};

enum class RuleKind { Hypothesis, BuiltIn, UserRule, Theorem, Induction, CaseAnalysis, Inversion, Gap };

std::string_view to_string(RuleKind k);

using LabelledFormula = std::pair<std::string, Formula>;

// What a premise may additionally assume: eigenvariables it introduces,
// hypotheses it discharges, and (for case splits) how eigenvariables of the
// enclosing context are refined inside it.
struct Discharge {
  std::string ctor;  // constructor, or rule name for an inversion case
  std::vector<Binder> eigenvars;
  std::vector<LabelledFormula> hypotheses;
  std::vector<std::pair<std::string, Term>> refinement;
};

struct Derivation;
using DerivationPtr = std::shared_ptr<const Derivation>;

struct Derivation {
  RuleKind kind = RuleKind::Gap;
  std::string name;  // hypothesis label, rule or theorem name
  BuiltinRule builtin = BuiltinRule::AndIntro;
  Formula conclusion;
  Substitution instantiation;  // schematic / proposition parameter names
  std::optional<Term> witness;    // ∀-elim, ∃-intro
  std::optional<Term> scrutinee;  // case analysis
  std::vector<DerivationPtr> premises;
  std::vector<Discharge> discharges;  // parallel to premises when non-empty
  std::string cite;  // label of the context fact this subtree re-proves, if any

  std::size_t size() const;
};

DerivationPtr make_hypothesis(std::string label, Formula f);
DerivationPtr make_builtin(BuiltinRule r, Formula conclusion, std::vector<DerivationPtr> premises,
                           std::vector<Discharge> discharges = {}, std::optional<Term> witness = std::nullopt);
DerivationPtr make_gap(Formula goal);

// Applies a refinement (eigenvariable ↦ term) to every formula and term of a
// derivation. Used when a fact from outside a case split is used inside it.
DerivationPtr rewrite_derivation(const DerivationPtr& d, const std::vector<std::pair<std::string, Term>>& refinement);
Formula rewrite_formula(const Formula& f, const std::vector<std::pair<std::string, Term>>& refinement);
DerivationPtr substitute_derivation(const DerivationPtr& d, const Substitution& s);

bool has_gaps(const DerivationPtr& d);

// One case of case analysis on a judgment fact: matching `rule` against the
// fact, with the fact's eigenvariables flexible.
struct Inversion {
  std::vector<std::pair<std::string, Term>> refinement;
  std::vector<Formula> premises;
  std::vector<std::string> var_sorts;  // sorts of the variables the case must name
  bool named = false;                  // false when `names` did not fit var_sorts
};

std::optional<Inversion> invert(const Formula& fact, const Schema& rule, const std::vector<Binder>& names);

struct ValidationOptions {
  bool allow_gaps = false;
};

// Re-checks every node of `d` locally against the built-in rule shapes and
// the instantiated statements in `lib`. Returns an explanation on failure.
std::optional<std::string> validate(const DerivationPtr& d, const Signature& sig, const Library& lib,
                                    const std::vector<LabelledFormula>& assumptions = {},
                                    const std::vector<Binder>& eigenvariables = {},
                                    ValidationOptions opts = {});

}  // namespace fitchmi
