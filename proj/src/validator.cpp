// Node-local re-checking of derivations. Deliberately shares nothing with the
// checker beyond the kernel: every node is compared against the shape of its
// rule, with alpha-equivalence as the only notion of sameness.

#include <algorithm>

#include "fitchmi/derivation.hpp"

namespace fitchmi {

namespace {

struct Invalid {
  std::string message;
};

using Refinement = std::vector<std::pair<std::string, Term>>;

class Validator {
 public:
  Validator(const Signature& sig, const Library& lib, ValidationOptions opts) : sig_(sig), lib_(lib), opts_(opts) {}

  void run(const Derivation& d, const std::vector<LabelledFormula>& assumptions, const std::vector<Binder>& eigen) {
    frames_.push_back(Frame{assumptions, eigen, {}});
    node(d);
  }

 private:
  struct Frame {
    std::vector<LabelledFormula> hyps;
    std::vector<Binder> eigen;
    Refinement refinement;
  };

  const Signature& sig_;
  const Library& lib_;
  ValidationOptions opts_;
  std::vector<Frame> frames_;

  [[noreturn]] static void fail(const Derivation& d, const std::string& why) {
    std::string head = std::string(to_string(d.kind));
    if (!d.name.empty()) head += " " + d.name;
    throw Invalid{head + " concluding `" + to_string(d.conclusion) + "': " + why};
  }

  static void expect(bool ok, const Derivation& d, const std::string& why) {
    if (!ok) fail(d, why);
  }

  // Assumptions of every frame, seen through the refinements of the frames
  // opened after it.
  std::vector<Formula> visible() const {
    std::vector<Formula> out;
    for (std::size_t i = 0; i < frames_.size(); ++i) {
      for (const auto& h : frames_[i].hyps) {
        Formula f = h.second;
        for (std::size_t j = i + 1; j < frames_.size(); ++j) f = rewrite_formula(f, frames_[j].refinement);
        out.push_back(std::move(f));
      }
    }
    return out;
  }

  const Binder* eigen(const std::string& name) const {
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it)
      for (const auto& b : it->eigen)
        if (b.name == name) return &b;
    return nullptr;
  }

  void well_scoped(const Derivation& d, const Formula& f) const {
    for (const auto& x : free_rigids(f)) expect(eigen(x) != nullptr, d, "variable " + x + " is not in scope");
    expect(!has_metas(f), d, "unresolved metavariable");
    expect(schematics_of(f).empty(), d, "schematic variable left uninstantiated");
  }

  void sorted_term(const Derivation& d, const Term& t, const std::string& sort) const {
    expect(t.sort == sort, d, "term " + to_string(t) + " is not of sort " + sort);
    switch (t.kind) {
      case TermKind::Rigid: {
        const Binder* b = eigen(t.name);
        expect(b && b->sort == sort, d, "variable " + t.name + " is not in scope");
        return;
      }
      case TermKind::Ctor: {
        const ConstructorSig* c = sig_.find_constructor(t.name);
        const std::string* s = sig_.constructor_sort(t.name);
        expect(c && s && *s == sort && c->arity() == t.args.size(), d, "ill-formed term " + to_string(t));
        for (std::size_t i = 0; i < t.args.size(); ++i) sorted_term(d, t.args[i], c->arg_sorts[i]);
        return;
      }
      default:
        fail(d, "term " + to_string(t) + " is not closed");
    }
  }

  void fresh(const Derivation& d, const std::vector<Binder>& vars, const std::vector<Formula>& avoid) const {
    auto seen = visible();
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const auto& v = vars[i];
      expect(sig_.find_sort(v.sort) != nullptr, d, "unknown sort " + v.sort);
      expect(eigen(v.name) == nullptr, d, "eigenvariable " + v.name + " is already in scope");
      for (std::size_t j = 0; j < i; ++j) expect(vars[j].name != v.name, d, "eigenvariable " + v.name + " repeated");
      for (const auto& f : seen) expect(!occurs_free(f, v.name), d, "eigenvariable " + v.name + " occurs in an assumption");
      for (const auto& f : avoid) expect(!occurs_free(f, v.name), d, "eigenvariable " + v.name + " escapes");
    }
  }

  void premise(const Derivation& d, std::size_t i) {
    if (d.discharges.empty() || i >= d.discharges.size()) {
      node(*d.premises[i]);
      return;
    }
    const Discharge& dis = d.discharges[i];
    frames_.push_back(Frame{dis.hypotheses, dis.eigenvars, dis.refinement});
    for (const auto& h : dis.hypotheses) well_scoped(d, h.second);
    node(*d.premises[i]);
    frames_.pop_back();
  }

  static bool plain(const Discharge& dis) {
    return dis.eigenvars.empty() && dis.hypotheses.empty() && dis.refinement.empty();
  }

  const Discharge& discharge(const Derivation& d, std::size_t i) const {
    expect(d.discharges.size() == d.premises.size(), d, "missing discharge information");
    return d.discharges[i];
  }

  void only_hypothesis(const Derivation& d, std::size_t i, const Formula& h) const {
    const Discharge& dis = discharge(d, i);
    expect(dis.eigenvars.empty() && dis.refinement.empty(), d, "unexpected eigenvariables");
    expect(dis.hypotheses.size() == 1 && alpha_equal(dis.hypotheses[0].second, h), d,
           "subproof must assume exactly `" + to_string(h) + "'");
  }

  void no_discharges(const Derivation& d) const {
    for (const auto& dis : d.discharges) expect(plain(dis), d, "rule discharges nothing");
  }

  void node(const Derivation& d) {
    well_scoped(d, d.conclusion);
    for (const auto& p : d.premises) expect(p != nullptr, d, "null premise");
    switch (d.kind) {
      case RuleKind::Hypothesis: {
        expect(d.premises.empty(), d, "hypotheses have no premises");
        auto seen = visible();
        bool found = std::any_of(seen.begin(), seen.end(), [&](const Formula& f) { return alpha_equal(f, d.conclusion); });
        expect(found, d, "not an assumption in scope");
        return;
      }
      case RuleKind::Gap:
        expect(opts_.allow_gaps, d, "proof has a gap");
        return;
      case RuleKind::BuiltIn:
        builtin(d);
        return;
      case RuleKind::UserRule:
      case RuleKind::Theorem:
        instance(d);
        return;
      case RuleKind::Induction:
        induction(d);
        return;
      case RuleKind::CaseAnalysis:
        case_analysis(d);
        return;
      case RuleKind::Inversion:
        inversion(d);
        return;
    }
  }

  void arity(const Derivation& d, std::size_t n) const {
    expect(d.premises.size() == n, d, "expected " + std::to_string(n) + " premises");
  }

  void builtin(const Derivation& d) {
    const Formula& c = d.conclusion;
    auto p = [&](std::size_t i) -> const Formula& { return d.premises[i]->conclusion; };
    switch (d.builtin) {
      case BuiltinRule::AndIntro:
        arity(d, 2);
        no_discharges(d);
        expect(c.kind == Connective::And && alpha_equal(c.lhs(), p(0)) && alpha_equal(c.rhs(), p(1)), d,
               "conjunction does not match its parts");
        break;
      case BuiltinRule::AndElim:
        arity(d, 1);
        no_discharges(d);
        expect(p(0).kind == Connective::And && (alpha_equal(c, p(0).lhs()) || alpha_equal(c, p(0).rhs())), d,
               "not a conjunct of the premise");
        break;
      case BuiltinRule::OrIntro:
        arity(d, 1);
        no_discharges(d);
        expect(c.kind == Connective::Or && (alpha_equal(c.lhs(), p(0)) || alpha_equal(c.rhs(), p(0))), d,
               "premise is not a disjunct");
        break;
      case BuiltinRule::OrElim:
        arity(d, 3);
        expect(p(0).kind == Connective::Or, d, "first premise is not a disjunction");
        expect(plain(discharge(d, 0)), d, "first premise discharges nothing");
        only_hypothesis(d, 1, p(0).lhs());
        only_hypothesis(d, 2, p(0).rhs());
        expect(alpha_equal(p(1), c) && alpha_equal(p(2), c), d, "branches do not conclude the result");
        break;
      case BuiltinRule::ImpIntro:
        arity(d, 1);
        expect(c.kind == Connective::Implies, d, "not an implication");
        only_hypothesis(d, 0, c.lhs());
        expect(alpha_equal(p(0), c.rhs()), d, "subproof does not conclude the consequent");
        break;
      case BuiltinRule::ImpElim:
        arity(d, 2);
        no_discharges(d);
        expect(p(0).kind == Connective::Implies && alpha_equal(p(0).lhs(), p(1)) && alpha_equal(p(0).rhs(), c), d,
               "premises do not fit modus ponens");
        break;
      case BuiltinRule::NotIntro:
        arity(d, 1);
        expect(c.kind == Connective::Not, d, "not a negation");
        only_hypothesis(d, 0, c.parts.at(0));
        expect(p(0).kind == Connective::Bottom, d, "subproof does not conclude ⊥");
        break;
      case BuiltinRule::NotElim:
        arity(d, 2);
        no_discharges(d);
        expect(c.kind == Connective::Bottom && p(1).kind == Connective::Not && alpha_equal(p(1).parts.at(0), p(0)), d,
               "premises are not a formula and its negation");
        break;
      case BuiltinRule::BotElim:
        arity(d, 1);
        no_discharges(d);
        expect(p(0).kind == Connective::Bottom, d, "premise is not ⊥");
        break;
      case BuiltinRule::ForallIntro: {
        arity(d, 1);
        expect(c.kind == Connective::Forall, d, "not a universal");
        const Discharge& dis = discharge(d, 0);
        expect(dis.hypotheses.empty() && dis.refinement.empty() && dis.eigenvars.size() == 1 &&
                   dis.eigenvars[0].sort == c.sort,
               d, "∀-intro needs exactly one eigenvariable of sort " + c.sort);
        const Binder& x = dis.eigenvars[0];
        fresh(d, {x}, {c});
        expect(alpha_equal(p(0), instantiate(c, Term::rigid(x.name, x.sort))), d, "body does not match");
        break;
      }
      case BuiltinRule::ForallElim:
        arity(d, 1);
        no_discharges(d);
        expect(p(0).kind == Connective::Forall && d.witness.has_value(), d, "premise is not a universal");
        sorted_term(d, *d.witness, p(0).sort);
        expect(alpha_equal(c, instantiate(p(0), *d.witness)), d, "not an instance of the premise");
        break;
      case BuiltinRule::ExistsIntro:
        arity(d, 1);
        no_discharges(d);
        expect(c.kind == Connective::Exists && d.witness.has_value(), d, "not an existential");
        sorted_term(d, *d.witness, c.sort);
        expect(alpha_equal(p(0), instantiate(c, *d.witness)), d, "premise is not an instance");
        break;
      case BuiltinRule::ExistsElim: {
        arity(d, 2);
        expect(p(0).kind == Connective::Exists, d, "first premise is not an existential");
        expect(plain(discharge(d, 0)), d, "first premise discharges nothing");
        const Discharge& dis = discharge(d, 1);
        expect(dis.refinement.empty() && dis.eigenvars.size() == 1 && dis.eigenvars[0].sort == p(0).sort &&
                   dis.hypotheses.size() == 1,
               d, "∃-elim needs one eigenvariable and one hypothesis");
        const Binder& w = dis.eigenvars[0];
        fresh(d, {w}, {c, p(0)});
        expect(alpha_equal(dis.hypotheses[0].second, instantiate(p(0), Term::rigid(w.name, w.sort))), d,
               "hypothesis is not the opened existential");
        expect(alpha_equal(p(1), c), d, "subproof does not conclude the result");
        break;
      }
    }
    for (std::size_t i = 0; i < d.premises.size(); ++i) premise(d, i);
  }

  void instance(const Derivation& d) {
    const Schema* s = d.kind == RuleKind::UserRule ? lib_.find_rule(d.name) : lib_.find_theorem(d.name);
    expect(s != nullptr, d, "unknown in this context");
    arity(d, s->premises.size());
    no_discharges(d);
    for (const auto& [name, value] : d.instantiation.schematics()) {
      auto it = std::find_if(s->params.begin(), s->params.end(), [&](const Binder& b) { return b.name == name; });
      expect(it != s->params.end(), d, "instantiates unknown variable " + name);
      sorted_term(d, value, it->sort);
    }
    for (const auto& [name, value] : d.instantiation.props()) {
      expect(std::find(s->props.begin(), s->props.end(), name) != s->props.end(), d,
             "instantiates unknown proposition " + name);
      well_scoped(d, value);
    }
    expect(alpha_equal(substitute(s->conclusion, d.instantiation), d.conclusion), d,
           "conclusion is not the instantiated statement");
    for (std::size_t i = 0; i < s->premises.size(); ++i) {
      expect(alpha_equal(substitute(s->premises[i], d.instantiation), d.premises[i]->conclusion), d,
             "premise " + std::to_string(i + 1) + " is not the instantiated statement");
      premise(d, i);
    }
  }

  const Sort& sort_of(const Derivation& d, const std::string& name) const {
    const Sort* s = sig_.find_sort(name);
    expect(s != nullptr && !s->constructors.empty(), d, "sort " + name + " is not inductive");
    return *s;
  }

  static Term pattern(const ConstructorSig& c, const std::string& sort, const std::vector<Binder>& vars) {
    std::vector<Term> args;
    for (const auto& v : vars) args.push_back(Term::rigid(v.name, v.sort));
    return Term::ctor(c.name, sort, std::move(args));
  }

  void constructor_vars(const Derivation& d, const ConstructorSig& c, const Discharge& dis) const {
    expect(dis.ctor == c.name, d, "case " + dis.ctor + " out of order, expected " + c.name);
    expect(dis.eigenvars.size() == c.arity(), d, "case " + c.name + " binds the wrong number of variables");
    for (std::size_t k = 0; k < c.arity(); ++k)
      expect(dis.eigenvars[k].sort == c.arg_sorts[k], d, "case " + c.name + " variable of wrong sort");
  }

  void induction(const Derivation& d) {
    const Formula& c = d.conclusion;
    expect(c.kind == Connective::Forall, d, "induction needs a universal");
    const Sort& sort = sort_of(d, c.sort);
    arity(d, sort.constructors.size());
    for (std::size_t i = 0; i < sort.constructors.size(); ++i) {
      const ConstructorSig& ctor = sort.constructors[i];
      const Discharge& dis = discharge(d, i);
      constructor_vars(d, ctor, dis);
      expect(dis.refinement.empty(), d, "induction does not refine");
      fresh(d, dis.eigenvars, {c});
      std::vector<Formula> ihs;
      for (const auto& v : dis.eigenvars)
        if (v.sort == c.sort) ihs.push_back(instantiate(c, Term::rigid(v.name, v.sort)));
      for (const auto& h : dis.hypotheses) {
        bool ok = std::any_of(ihs.begin(), ihs.end(), [&](const Formula& f) { return alpha_equal(f, h.second); });
        expect(ok, d, "`" + to_string(h.second) + "' is not an induction hypothesis of case " + ctor.name);
      }
      expect(alpha_equal(d.premises[i]->conclusion, instantiate(c, pattern(ctor, sort.name, dis.eigenvars))), d,
             "case " + ctor.name + " proves the wrong formula");
      premise(d, i);
    }
  }

  void case_analysis(const Derivation& d) {
    const Formula& c = d.conclusion;
    expect(d.scrutinee && d.scrutinee->kind == TermKind::Rigid, d, "scrutinee must be a variable");
    const Term& x = *d.scrutinee;
    const Binder* b = eigen(x.name);
    expect(b && b->sort == x.sort, d, "scrutinee is not in scope");
    const Sort& sort = sort_of(d, x.sort);
    arity(d, sort.constructors.size());
    for (std::size_t i = 0; i < sort.constructors.size(); ++i) {
      const ConstructorSig& ctor = sort.constructors[i];
      const Discharge& dis = discharge(d, i);
      constructor_vars(d, ctor, dis);
      expect(dis.hypotheses.empty(), d, "case analysis adds no hypotheses");
      fresh(d, dis.eigenvars, {c});
      Term pat = pattern(ctor, sort.name, dis.eigenvars);
      expect(dis.refinement.size() == 1 && dis.refinement[0].first == x.name && dis.refinement[0].second == pat, d,
             "case " + ctor.name + " must refine " + x.name + " to " + to_string(pat));
      expect(alpha_equal(d.premises[i]->conclusion, replace_free(c, x.name, pat)), d,
             "case " + ctor.name + " proves the wrong formula");
      premise(d, i);
    }
  }

  void inversion(const Derivation& d) {
    expect(!d.premises.empty(), d, "missing the analysed fact");
    const Formula& fact = d.premises[0]->conclusion;
    const Formula& c = d.conclusion;
    expect(fact.is_literal(), d, "analysed fact is not a judgment");
    expect(d.discharges.size() == d.premises.size() && plain(d.discharges[0]), d, "missing discharge information");
    std::vector<const Schema*> expected;
    for (const auto& r : lib_.rules)
      if (invert(fact, r, {})) expected.push_back(&r);
    arity(d, expected.size() + 1);
    premise(d, 0);
    for (std::size_t i = 0; i < expected.size(); ++i) {
      const Discharge& dis = d.discharges[i + 1];
      expect(dis.ctor == expected[i]->name, d, "case for rule " + expected[i]->name + " expected");
      auto inv = invert(fact, *expected[i], dis.eigenvars);
      expect(inv && inv->named, d, "case " + dis.ctor + " names the wrong variables");
      fresh(d, dis.eigenvars, {c, fact});
      expect(dis.refinement.size() == inv->refinement.size(), d, "case " + dis.ctor + " refines differently");
      for (std::size_t k = 0; k < dis.refinement.size(); ++k)
        expect(dis.refinement[k] == inv->refinement[k], d, "case " + dis.ctor + " refines differently");
      for (const auto& h : dis.hypotheses) {
        bool ok = std::any_of(inv->premises.begin(), inv->premises.end(),
                              [&](const Formula& f) { return alpha_equal(f, h.second); });
        expect(ok, d, "`" + to_string(h.second) + "' is not a premise of rule " + dis.ctor);
      }
      expect(alpha_equal(d.premises[i + 1]->conclusion, rewrite_formula(c, inv->refinement)), d,
             "case " + dis.ctor + " proves the wrong formula");
      premise(d, i + 1);
    }
  }
};

}  // namespace

std::optional<std::string> validate(const DerivationPtr& d, const Signature& sig, const Library& lib,
                                    const std::vector<LabelledFormula>& assumptions,
                                    const std::vector<Binder>& eigenvariables, ValidationOptions opts) {
  if (!d) return std::string("empty derivation");
  try {
    Validator(sig, lib, opts).run(*d, assumptions, eigenvariables);
  } catch (const Invalid& e) {
    return e.message;
  }
  return std::nullopt;
}

}  // namespace fitchmi
