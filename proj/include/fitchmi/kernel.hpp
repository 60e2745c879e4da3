#pragma once

// First-order terms and formulas over user-declared inductive sorts, together
// with substitution, alpha-equivalence and Robinson unification.
//
// Variables are named. Bound occurrences of a quantified variable and
// eigenvariables are both `Rigid` terms; which one a given occurrence is
// depends only on the binders above it. All operations here respect that
// scoping (capture-avoiding substitution, de Bruijn-style comparison).

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fitchmi {

enum class TermKind { Rigid, Schematic, Meta, Ctor };

struct Term {
  TermKind kind = TermKind::Ctor;
  std::string name;  // variable or constructor name, empty for metavariables
  std::string sort;
  int meta = -1;
  std::vector<Term> args;

  static Term rigid(std::string name, std::string sort);
  static Term schematic(std::string name, std::string sort);
  static Term metavar(int id, std::string sort);
  static Term ctor(std::string name, std::string sort, std::vector<Term> args = {});

  bool is_var() const { return kind != TermKind::Ctor; }
  bool operator==(const Term&) const = default;
};

enum class Connective { Pred, And, Or, Implies, Not, Forall, Exists, PropParam, PropMeta, Bottom };

struct Formula {
  Connective kind = Connective::Bottom;
  std::string name;  // predicate, bound variable or proposition parameter
  std::string sort;  // sort of the bound variable for Forall / Exists
  int meta = -1;     // PropMeta id
  std::vector<Term> args;
  std::vector<Formula> parts;  // operands; a binder keeps its body in parts[0]

  static Formula pred(std::string name, std::vector<Term> args = {});
  static Formula conj(Formula a, Formula b);
  static Formula disj(Formula a, Formula b);
  static Formula implies(Formula a, Formula b);
  static Formula negate(Formula a);
  static Formula forall(std::string var, std::string sort, Formula body);
  static Formula exists(std::string var, std::string sort, Formula body);
  static Formula prop(std::string name);
  static Formula prop_meta(int id);
  static Formula bottom();

  bool is_literal() const { return kind == Connective::Pred; }
  bool is_binder() const { return kind == Connective::Forall || kind == Connective::Exists; }
  const Formula& lhs() const { return parts.at(0); }
  const Formula& rhs() const { return parts.at(1); }
  const Formula& body() const { return parts.at(0); }

  bool operator==(const Formula&) const = default;
};

struct Binder {
  std::string name;
  std::string sort;
  bool operator==(const Binder&) const = default;
};

struct ConstructorSig {
  std::string name;
  std::vector<std::string> arg_sorts;
  std::size_t arity() const { return arg_sorts.size(); }
  bool operator==(const ConstructorSig&) const = default;
};

struct Sort {
  std::string name;
  std::vector<ConstructorSig> constructors;
  bool operator==(const Sort&) const = default;
};

class SignatureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sorts, constructors and predicate signatures. Predicates are not declared
// up front; the first use fixes their arity and argument sorts.
class Signature {
 public:
  void add_sort(Sort sort);
  const Sort* find_sort(std::string_view name) const;
  const ConstructorSig* find_constructor(std::string_view name) const;
  const std::string* constructor_sort(std::string_view name) const;
  const std::vector<Sort>& sorts() const { return sorts_; }

  // Returns false when `name` already has a different signature.
  bool declare_predicate(const std::string& name, const std::vector<std::string>& arg_sorts);
  const std::vector<std::string>* predicate(std::string_view name) const;
  const std::map<std::string, std::vector<std::string>, std::less<>>& predicates() const { return predicates_; }

  // Smallest closed constructor term of `sort`, if the sort is inhabited.
  std::optional<Term> ground_term(const std::string& sort) const;

 private:
  std::vector<Sort> sorts_;
  std::map<std::string, std::pair<std::size_t, std::size_t>, std::less<>> ctor_index_;
  std::map<std::string, std::vector<std::string>, std::less<>> predicates_;
};

// Maps metavariables and schematic variables to terms, and proposition
// metavariables / proposition parameters to formulas. Kept idempotent: no
// range element mentions a bound metavariable.
class Substitution {
 public:
  bool empty() const;

  const Term* meta(int id) const;
  const Term* schematic(const std::string& name) const;
  const Formula* prop_meta(int id) const;
  const Formula* prop(const std::string& name) const;

  void bind_meta(int id, Term value);
  void bind_prop_meta(int id, Formula value);
  void bind_schematic(std::string name, Term value);
  void bind_prop(std::string name, Formula value);

  const std::map<int, Term>& metas() const { return metas_; }
  const std::map<std::string, Term>& schematics() const { return schematics_; }
  const std::map<int, Formula>& prop_metas() const { return prop_metas_; }
  const std::map<std::string, Formula>& props() const { return props_; }

  // Free rigid variable names occurring anywhere in the range.
  std::set<std::string> range_rigids() const;

  bool operator==(const Substitution&) const = default;

 private:
  std::map<int, Term> metas_;
  std::map<std::string, Term> schematics_;
  std::map<int, Formula> prop_metas_;
  std::map<std::string, Formula> props_;
};

// Episode-local supply of fresh metavariable ids.
class MetaSupply {
 public:
  explicit MetaSupply(int first = 0) : next_(first) {}
  int next() { return next_++; }
  int peek() const { return next_; }

 private:
  int next_;
};

Term fresh_meta(MetaSupply& supply, const std::string& sort);

Term substitute(const Term& t, const Substitution& s);
Formula substitute(const Formula& f, const Substitution& s);

// Replaces free occurrences of the rigid variable `name` by `value`,
// renaming binders that would capture a variable of `value`.
Formula replace_free(const Formula& f, const std::string& name, const Term& value);
Term replace_free(const Term& t, const std::string& name, const Term& value);

// Body of a binder with its bound variable replaced by `value`.
Formula instantiate(const Formula& binder, const Term& value);

bool alpha_equal(const Formula& a, const Formula& b);

std::set<std::string> free_rigids(const Formula& f);
std::set<std::string> free_rigids(const Term& t);
bool occurs_free(const Formula& f, const std::string& name);
bool occurs_free(const Term& t, const std::string& name);
bool has_metas(const Formula& f);
bool has_metas(const Term& t);
std::set<int> metas_of(const Formula& f);
std::set<int> metas_of(const Term& t);
std::vector<Binder> schematics_of(const Formula& f);

// Replaces every schematic variable by a fresh metavariable and every
// proposition parameter by a fresh proposition metavariable. The returned
// substitution maps the schematic / parameter names to those fresh variables.
std::pair<Formula, Substitution> freshen_schematics(const Formula& f, MetaSupply& supply);
Substitution freshening(const std::vector<Binder>& schematics, const std::vector<std::string>& props,
                        MetaSupply& supply);

// Canonical Unicode rendering, e.g. `∀ (n : ℕ) : Sum(n, Zero, n)`.
// Metavariables print as `?k` and proposition metavariables as `?Pk`.
std::string to_string(const Term& t);
std::string to_string(const Formula& f);

enum class UnifyError { Clash, OccursCheck, SortMismatch };

struct UnifyFailure {
  UnifyError error = UnifyError::Clash;
  std::string detail;
};

struct UnifyResult {
  std::optional<Substitution> unifier;
  UnifyFailure failure;
  explicit operator bool() const { return unifier.has_value(); }
};

std::string_view to_string(UnifyError e);

// Most general unifier extending `under`. Rigid variables only unify with
// themselves (or a metavariable); schematic variables are compared by name.
UnifyResult unify(const Term& a, const Term& b, const Substitution& under = {});
UnifyResult unify(const Formula& a, const Formula& b, const Substitution& under = {});

}  // namespace fitchmi
