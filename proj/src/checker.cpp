#include "fitchmi/checker.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <set>

namespace fitchmi {

std::string_view to_string(CheckCode c) {
  switch (c) {
    case CheckCode::UnknownLabel: return "UnknownLabel";
    case CheckCode::LabelNotVisible: return "LabelNotVisible";
    case CheckCode::NotASubproof: return "NotASubproof";
    case CheckCode::WrongArity: return "WrongArity";
    case CheckCode::ShapeMismatch: return "ShapeMismatch";
    case CheckCode::UnificationClash: return "UnificationClash";
    case CheckCode::OccursCheck: return "OccursCheck";
    case CheckCode::SortMismatch: return "SortMismatch";
    case CheckCode::FreshnessViolation: return "FreshnessViolation";
    case CheckCode::EigenvariableEscape: return "EigenvariableEscape";
    case CheckCode::MissingCase: return "MissingCase";
    case CheckCode::DuplicateCase: return "DuplicateCase";
    case CheckCode::ImpossibleCase: return "ImpossibleCase";
    case CheckCode::WrongCaseResult: return "WrongCaseResult";
    case CheckCode::UnknownConstructor: return "UnknownConstructor";
    case CheckCode::NotUniversal: return "NotUniversal";
    case CheckCode::ScrutineeNotInScope: return "ScrutineeNotInScope";
    case CheckCode::SearchStuck: return "SearchStuck";
    case CheckCode::AutoDisabled: return "AutoDisabled";
    case CheckCode::UnknownRule: return "UnknownRule";
    case CheckCode::UnknownTheorem: return "UnknownTheorem";
    case CheckCode::ResultMismatch: return "ResultMismatch";
    case CheckCode::DuplicateLabel: return "DuplicateLabel";
    case CheckCode::UnresolvedSchematic: return "UnresolvedSchematic";
    case CheckCode::EmptyBlock: return "EmptyBlock";
    case CheckCode::InvalidDerivation: return "InvalidDerivation";
  }
  return "?";
}

bool Report::all_proved() const {
  return std::all_of(theorems.begin(), theorems.end(), [](const TheoremReport& t) { return t.proved; });
}

SearchHook default_search_hook(int max_depth) {
  return [max_depth](const Formula& goal, const SearchEnv& env) {
    SearchOptions opts;
    opts.max_depth = max_depth;
    SearchOutcome out = search(goal, env, opts);
    if (out.kind == SearchOutcome::Kind::Proved) return ProveResult{out.derivation, ""};
    return ProveResult{nullptr, render_trace(out.trace) + "stuck on `" + to_string(out.stuck_goal) + "'"};
  };
}

namespace {

using Refinement = std::vector<std::pair<std::string, Term>>;

struct Failure {
  CheckError error;
};

CheckCode code_of(UnifyError e) {
  switch (e) {
    case UnifyError::OccursCheck: return CheckCode::OccursCheck;
    case UnifyError::SortMismatch: return CheckCode::SortMismatch;
    case UnifyError::Clash: break;
  }
  return CheckCode::UnificationClash;
}

struct ClosedAssumption {
  AssumptionKind kind;
  std::string label;
  Formula formula;
  std::vector<Binder> vars;
};

struct Closed {
  std::vector<ClosedAssumption> assumptions;
  Formula result;
  DerivationPtr derivation;  // of `result`, under the assumptions
};

struct Fact {
  std::string label;
  Formula formula;
  DerivationPtr derivation;
  std::shared_ptr<const Closed> subproof;
};

struct Resolved {
  Formula formula;
  DerivationPtr derivation;
  const Closed* subproof = nullptr;  // only when seen without refinement
};

// A subproof read as a single formula: hypotheses become implications and
// eigenvariables universal quantifiers.
std::pair<Formula, DerivationPtr> fold(const Closed& c) {
  Formula f = c.result;
  DerivationPtr d = c.derivation;
  auto forall = [&](const Binder& b) {
    f = Formula::forall(b.name, b.sort, f);
    d = make_builtin(BuiltinRule::ForallIntro, f, {d}, {Discharge{"", {b}, {}, {}}});
  };
  auto implies = [&](const std::string& label, const Formula& h) {
    f = Formula::implies(h, f);
    d = make_builtin(BuiltinRule::ImpIntro, f, {d}, {Discharge{"", {}, {{label, h}}, {}}});
  };
  for (auto it = c.assumptions.rbegin(); it != c.assumptions.rend(); ++it) {
    if (it->kind != AssumptionKind::ForAny) implies(it->label, it->formula);
    if (it->kind != AssumptionKind::Hypothesis)
      for (auto v = it->vars.rbegin(); v != it->vars.rend(); ++v) forall(*v);
  }
  return {f, d};
}

Term pattern_term(const std::string& ctor, const std::string& sort, const std::vector<Binder>& vars) {
  std::vector<Term> args;
  for (const auto& v : vars) args.push_back(Term::rigid(v.name, v.sort));
  return Term::ctor(ctor, sort, std::move(args));
}

class Checker {
 public:
  Checker(const Signature& sig, const Library& lib, const CheckOptions& opts) : sig_(sig), lib_(lib), opts_(opts) {}

  void seed(const std::vector<EnvFact>& facts, const std::vector<Binder>& eigen) {
    Frame base;
    base.eigen = eigen;
    for (const auto& f : facts) base.facts.push_back(Fact{f.label, f.formula, f.derivation, nullptr});
    frames_.push_back(std::move(base));
  }

  // Checks the steps of a block in a fresh frame and returns its result.
  std::pair<Formula, DerivationPtr> block(const Block& b, SourcePos where) {
    frames_.emplace_back();
    auto r = steps(b, where);
    pop();
    return r;
  }

 private:
  struct Frame {
    std::vector<Fact> facts;
    std::vector<Binder> eigen;
    Refinement rewrite;  // applies to facts of the frames below
  };

  const Signature& sig_;
  const Library& lib_;
  const CheckOptions& opts_;
  std::vector<Frame> frames_;
  std::set<std::string> closed_;

  [[noreturn]] static void fail(CheckCode code, SourcePos pos, std::string message, std::string expected = "",
                                std::string actual = "") {
    CheckError e;
    e.code = code;
    e.pos = pos;
    e.message = std::move(message);
    e.expected = std::move(expected);
    e.actual = std::move(actual);
    throw Failure{std::move(e)};
  }

  static std::string quote(const Formula& f) { return "`" + to_string(f) + "'"; }

  void pop() {
    for (const auto& f : frames_.back().facts)
      if (!f.label.empty()) closed_.insert(f.label);
    frames_.pop_back();
  }

  void add_fact(Fact f, SourcePos pos) {
    Frame& top = frames_.back();
    if (!f.label.empty())
      for (const auto& g : top.facts)
        if (g.label == f.label) fail(CheckCode::DuplicateLabel, pos, "label " + f.label + " is already used in this block");
    top.facts.push_back(std::move(f));
  }

  Refinement refinement_above(std::size_t frame) const {
    Refinement r;
    for (std::size_t j = frame + 1; j < frames_.size(); ++j)
      r.insert(r.end(), frames_[j].rewrite.begin(), frames_[j].rewrite.end());
    return r;
  }

  std::vector<EnvFact> visible_facts() const {
    std::vector<EnvFact> out;
    for (std::size_t i = frames_.size(); i-- > 0;) {
      Refinement r = refinement_above(i);
      const auto& facts = frames_[i].facts;
      for (const auto& f : facts) {
        if (r.empty()) out.push_back({f.label, f.formula, f.derivation});
        else out.push_back({f.label, rewrite_formula(f.formula, r), rewrite_derivation(f.derivation, r)});
      }
    }
    return out;
  }

  std::vector<Binder> eigen_in_scope() const {
    std::vector<Binder> out;
    for (const auto& fr : frames_) out.insert(out.end(), fr.eigen.begin(), fr.eigen.end());
    return out;
  }

  const Binder* find_eigen(const std::string& name) const {
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it)
      for (const auto& b : it->eigen)
        if (b.name == name) return &b;
    return nullptr;
  }

  Resolved resolve(const Ref& ref) const {
    for (std::size_t i = frames_.size(); i-- > 0;) {
      // The seeded frame lists facts innermost first; the others in order.
      const auto& facts = frames_[i].facts;
      for (std::size_t k = 0; k < facts.size(); ++k) {
        const Fact& f = i == 0 ? facts[k] : facts[facts.size() - 1 - k];
        if (f.label != ref.label) continue;
        Refinement r = refinement_above(i);
        if (r.empty()) return Resolved{f.formula, f.derivation, f.subproof.get()};
        return Resolved{rewrite_formula(f.formula, r), rewrite_derivation(f.derivation, r), nullptr};
      }
    }
    if (closed_.count(ref.label))
      fail(CheckCode::LabelNotVisible, ref.pos, "label " + ref.label + " belongs to a closed subproof or case");
    fail(CheckCode::UnknownLabel, ref.pos, "no fact labelled " + ref.label + " at this point");
  }

  const Closed& subproof(const Ref& ref) const {
    Resolved r = resolve(ref);
    if (!r.subproof) fail(CheckCode::NotASubproof, ref.pos, "label " + ref.label + " does not name a subproof");
    return *r.subproof;
  }

  std::vector<LabelledFormula> visible_formulas() const {
    std::vector<LabelledFormula> out;
    for (std::size_t i = frames_.size(); i-- > 0;) {
      Refinement r = refinement_above(i);
      for (const auto& f : frames_[i].facts) out.emplace_back(f.label, rewrite_formula(f.formula, r));
    }
    return out;
  }

  void fresh(const std::vector<Binder>& vars, const std::vector<Formula>& also, SourcePos pos) const {
    std::vector<EnvFact> facts;
    for (auto& [label, f] : visible_formulas()) facts.push_back({label, f, nullptr});
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const auto& v = vars[i];
      for (std::size_t j = 0; j < i; ++j)
        if (vars[j].name == v.name) fail(CheckCode::FreshnessViolation, pos, "variable " + v.name + " is bound twice");
      if (find_eigen(v.name)) fail(CheckCode::FreshnessViolation, pos, "variable " + v.name + " is already in scope");
      for (const auto& f : facts)
        if (occurs_free(f.formula, v.name))
          fail(CheckCode::FreshnessViolation, pos,
               "variable " + v.name + " occurs in " + (f.label.empty() ? "a visible fact" : "fact " + f.label), "",
               to_string(f.formula));
      for (const auto& f : also)
        if (occurs_free(f, v.name)) fail(CheckCode::FreshnessViolation, pos, "variable " + v.name + " occurs in " + quote(f));
    }
  }

  std::pair<Formula, DerivationPtr> steps(const Block& b, SourcePos where) {
    if (b.empty()) fail(CheckCode::EmptyBlock, where, "empty block");
    std::pair<Formula, DerivationPtr> last;
    for (const auto& s : b) {
      if (s.is_line()) {
        const Line& l = s.line();
        DerivationPtr d;
        try {
          d = line(l);
        } catch (Failure& f) {
          if (f.error.label.empty()) f.error.label = l.label;
          throw;
        }
        last = {l.formula, d};
        add_fact(Fact{l.label, l.formula, d, nullptr}, l.pos);
      } else {
        auto c = std::make_shared<const Closed>(open(s.subproof()));
        last = fold(*c);
        add_fact(Fact{s.subproof().label, last.first, last.second, c}, s.pos());
      }
    }
    return last;
  }

  Closed open(const Subproof& sp) {
    Closed c;
    frames_.emplace_back();
    for (const auto& a : sp.assumptions) {
      if (a.kind != AssumptionKind::Hypothesis) {
        fresh(a.vars, {}, a.pos);
        auto& eig = frames_.back().eigen;
        eig.insert(eig.end(), a.vars.begin(), a.vars.end());
      }
      if (a.kind != AssumptionKind::ForAny)
        add_fact(Fact{a.label, a.formula, make_hypothesis(a.label, a.formula), nullptr}, a.pos);
      c.assumptions.push_back(ClosedAssumption{a.kind, a.label, a.formula, a.vars});
    }
    auto [result, d] = steps(sp.body, sp.pos);
    pop();
    c.result = result;
    c.derivation = d;
    return c;
  }

  DerivationPtr line(const Line& l) {
    const Justification& j = l.just;
    switch (j.kind) {
      case JustKind::Rule: {
        const Schema* s = lib_.find_rule(j.name);
        if (!s) fail(CheckCode::UnknownRule, l.pos, "no rule " + j.name + " is declared before this theorem");
        return instance(*s, RuleKind::UserRule, l);
      }
      case JustKind::Theorem: {
        const Schema* s = lib_.find_theorem(j.name);
        if (!s) fail(CheckCode::UnknownTheorem, l.pos, "no proved theorem " + j.name + " precedes this one");
        return instance(*s, RuleKind::Theorem, l);
      }
      case JustKind::BuiltIn: return builtin(l);
      case JustKind::Induction: return induction(l);
      case JustKind::CaseAnalysis: return j.fact ? inversion(l) : case_analysis(l);
      case JustKind::Prove: return prove(l);
    }
    fail(CheckCode::ShapeMismatch, l.pos, "unsupported justification");
  }

  void arity(const Line& l, std::size_t n) const {
    if (l.just.refs.size() != n)
      fail(CheckCode::WrongArity, l.pos,
           "expected " + std::to_string(n) + " reference" + (n == 1 ? "" : "s") + ", got " +
               std::to_string(l.just.refs.size()));
  }

  DerivationPtr instance(const Schema& s, RuleKind kind, const Line& l) {
    const auto& refs = l.just.refs;
    arity(l, s.premises.size());
    MetaSupply supply;
    Substitution fresh_vars = freshening(s.params, s.props, supply);
    Substitution acc;
    std::vector<DerivationPtr> premises;
    for (std::size_t i = 0; i < refs.size(); ++i) {
      Resolved r = resolve(refs[i]);
      Formula pattern = substitute(s.premises[i], fresh_vars);
      auto u = unify(pattern, r.formula, acc);
      if (!u)
        fail(code_of(u.failure.error), refs[i].pos,
             "premise " + std::to_string(i + 1) + " of " + s.name + " does not match " + refs[i].label + ": " +
                 u.failure.detail,
             to_string(substitute(pattern, acc)), to_string(r.formula));
      acc = *u.unifier;
      premises.push_back(r.derivation);
    }
    Formula concl = substitute(s.conclusion, fresh_vars);
    auto u = unify(concl, l.formula, acc);
    if (!u)
      fail(code_of(u.failure.error), l.pos, "conclusion of " + s.name + " does not match: " + u.failure.detail,
           to_string(substitute(concl, acc)), to_string(l.formula));
    acc = *u.unifier;
    auto d = std::make_shared<Derivation>();
    d->kind = kind;
    d->name = s.name;
    d->conclusion = l.formula;
    for (const auto& p : s.params) {
      Term t = substitute(*fresh_vars.schematic(p.name), acc);
      if (!has_metas(t)) d->instantiation.bind_schematic(p.name, t);
    }
    for (const auto& p : s.props) {
      Formula f = substitute(*fresh_vars.prop(p), acc);
      if (!has_metas(f)) d->instantiation.bind_prop(p, f);
    }
    for (const auto& pr : s.premises)
      if (has_metas(substitute(substitute(pr, fresh_vars), acc)))
        fail(CheckCode::UnresolvedSchematic, l.pos, "the instance of " + s.name + " is not determined");
    d->premises = std::move(premises);
    return d;
  }

  Resolved formula_ref(const Line& l, std::size_t i) const { return resolve(l.just.refs.at(i)); }

  [[noreturn]] void mismatch(const Line& l, const std::string& what, const Formula& expected) const {
    fail(CheckCode::ShapeMismatch, l.pos, what, to_string(expected), to_string(l.formula));
  }

  // Strips k leading binders of `kind`, replacing the bound variables by
  // fresh metavariables.
  static std::pair<Formula, std::vector<Term>> open_binders(const Formula& f, Connective kind, int k, MetaSupply& supply) {
    Formula cur = f;
    std::vector<Term> metas;
    for (int i = 0; i < k; ++i) {
      Term m = fresh_meta(supply, cur.sort);
      metas.push_back(m);
      cur = instantiate(cur, m);
    }
    (void)kind;
    return {cur, metas};
  }

  static int count_binders(const Formula& f, Connective kind) {
    int n = 0;
    for (const Formula* cur = &f; cur->kind == kind; cur = &cur->body()) ++n;
    return n;
  }

  std::vector<Term> witnesses(const std::vector<Term>& metas, const Substitution& s, SourcePos pos) const {
    std::vector<Term> out;
    for (const auto& m : metas) {
      Term t = substitute(m, s);
      if (has_metas(t)) {
        auto g = sig_.ground_term(m.sort);
        if (!g) fail(CheckCode::SortMismatch, pos, "sort " + m.sort + " has no closed terms");
        t = *g;
      }
      out.push_back(t);
    }
    return out;
  }

  DerivationPtr forall_elim(const Line& l) {
    arity(l, 1);
    Resolved a = formula_ref(l, 0);
    if (a.formula.kind != Connective::Forall)
      fail(CheckCode::ShapeMismatch, l.just.refs[0].pos, l.just.refs[0].label + " is not universally quantified", "",
           to_string(a.formula));
    int n = count_binders(a.formula, Connective::Forall);
    UnifyFailure first;
    for (int k = 1; k <= n; ++k) {
      MetaSupply supply;
      auto [body, metas] = open_binders(a.formula, Connective::Forall, k, supply);
      auto u = unify(body, l.formula);
      if (!u) {
        if (k == 1) first = u.failure;
        continue;
      }
      DerivationPtr d = a.derivation;
      Formula cur = a.formula;
      for (const auto& w : witnesses(metas, *u.unifier, l.pos)) {
        cur = instantiate(cur, w);
        d = make_builtin(BuiltinRule::ForallElim, cur, {d}, {}, w);
      }
      return d;
    }
    MetaSupply supply;
    fail(code_of(first.error), l.pos, "not an instance of " + l.just.refs[0].label + ": " + first.detail,
         to_string(open_binders(a.formula, Connective::Forall, 1, supply).first), to_string(l.formula));
  }

  DerivationPtr exists_intro(const Line& l) {
    arity(l, 1);
    Resolved a = formula_ref(l, 0);
    if (l.formula.kind != Connective::Exists) mismatch(l, "∃-intro must state an existential", l.formula);
    int n = count_binders(l.formula, Connective::Exists);
    UnifyFailure first;
    for (int k = 1; k <= n; ++k) {
      MetaSupply supply;
      auto [body, metas] = open_binders(l.formula, Connective::Exists, k, supply);
      auto u = unify(body, a.formula);
      if (!u) {
        if (k == 1) first = u.failure;
        continue;
      }
      auto ws = witnesses(metas, *u.unifier, l.pos);
      std::vector<Formula> levels{l.formula};
      for (const auto& w : ws) levels.push_back(instantiate(levels.back(), w));
      DerivationPtr d = a.derivation;
      for (std::size_t i = ws.size(); i-- > 0;) d = make_builtin(BuiltinRule::ExistsIntro, levels[i], {d}, {}, ws[i]);
      return d;
    }
    MetaSupply supply;
    fail(code_of(first.error), l.just.refs[0].pos,
         l.just.refs[0].label + " is not an instance of the stated body: " + first.detail,
         to_string(open_binders(l.formula, Connective::Exists, 1, supply).first), to_string(a.formula));
  }

  DerivationPtr exists_elim(const Line& l) {
    arity(l, 2);
    Resolved e = formula_ref(l, 0);
    const Closed& s = subproof(l.just.refs[1]);
    if (e.formula.kind != Connective::Exists)
      fail(CheckCode::ShapeMismatch, l.just.refs[0].pos, l.just.refs[0].label + " is not an existential", "",
           to_string(e.formula));
    if (s.assumptions.size() != 1 || s.assumptions[0].kind != AssumptionKind::ForSome)
      fail(CheckCode::ShapeMismatch, l.just.refs[1].pos, l.just.refs[1].label + " must be a `for some' subproof");
    const ClosedAssumption& a = s.assumptions[0];
    std::vector<Formula> levels{e.formula};
    for (const auto& v : a.vars) {
      const Formula& cur = levels.back();
      if (cur.kind != Connective::Exists || cur.sort != v.sort)
        fail(CheckCode::ShapeMismatch, l.just.refs[1].pos, "variables of " + l.just.refs[1].label + " do not match " +
                                                              l.just.refs[0].label);
      levels.push_back(instantiate(cur, Term::rigid(v.name, v.sort)));
    }
    if (!alpha_equal(levels.back(), a.formula))
      fail(CheckCode::ShapeMismatch, l.just.refs[1].pos, "assumption of " + l.just.refs[1].label + " does not open " +
                                                            l.just.refs[0].label,
           to_string(levels.back()), to_string(a.formula));
    for (const auto& v : a.vars)
      if (occurs_free(s.result, v.name))
        fail(CheckCode::EigenvariableEscape, l.pos, "result of " + l.just.refs[1].label + " mentions " + v.name, "",
             to_string(s.result));
    if (!alpha_equal(s.result, l.formula))
      fail(CheckCode::ResultMismatch, l.pos, "stated formula differs from the result of " + l.just.refs[1].label,
           to_string(s.result), to_string(l.formula));
    // Innermost variable first; outer levels assume the partially opened formula.
    DerivationPtr d = s.derivation;
    for (std::size_t i = a.vars.size(); i-- > 0;) {
      std::string label = i + 1 == a.vars.size() ? a.label : "";
      DerivationPtr ex = i == 0 ? e.derivation : make_hypothesis("", levels[i]);
      d = make_builtin(BuiltinRule::ExistsElim, l.formula, {ex, d},
                       {Discharge{}, Discharge{"", {a.vars[i]}, {{label, levels[i + 1]}}, {}}});
    }
    return d;
  }

  const ClosedAssumption& single_hypothesis(const Line& l, std::size_t i, const Closed& s) const {
    if (s.assumptions.size() != 1 || s.assumptions[0].kind != AssumptionKind::Hypothesis)
      fail(CheckCode::ShapeMismatch, l.just.refs[i].pos, l.just.refs[i].label + " must assume exactly one hypothesis");
    return s.assumptions[0];
  }

  DerivationPtr builtin(const Line& l) {
    const auto& refs = l.just.refs;
    const Formula& st = l.formula;
    switch (l.just.builtin) {
      case BuiltinRule::AndIntro: {
        arity(l, 2);
        Resolved a = formula_ref(l, 0), b = formula_ref(l, 1);
        Formula expected = Formula::conj(a.formula, b.formula);
        if (!alpha_equal(st, expected)) mismatch(l, "stated formula is not the conjunction of the references", expected);
        return make_builtin(BuiltinRule::AndIntro, st, {a.derivation, b.derivation});
      }
      case BuiltinRule::AndElim: {
        arity(l, 1);
        Resolved a = formula_ref(l, 0);
        if (a.formula.kind != Connective::And)
          fail(CheckCode::ShapeMismatch, refs[0].pos, refs[0].label + " is not a conjunction", "", to_string(a.formula));
        if (!alpha_equal(st, a.formula.lhs()) && !alpha_equal(st, a.formula.rhs()))
          mismatch(l, "stated formula is neither conjunct of " + refs[0].label, a.formula);
        return make_builtin(BuiltinRule::AndElim, st, {a.derivation});
      }
      case BuiltinRule::OrIntro: {
        arity(l, 1);
        Resolved a = formula_ref(l, 0);
        if (st.kind != Connective::Or || (!alpha_equal(st.lhs(), a.formula) && !alpha_equal(st.rhs(), a.formula)))
          mismatch(l, "stated formula is not a disjunction with " + refs[0].label + " as a side", a.formula);
        return make_builtin(BuiltinRule::OrIntro, st, {a.derivation});
      }
      case BuiltinRule::OrElim: {
        arity(l, 3);
        Resolved d = formula_ref(l, 0);
        if (d.formula.kind != Connective::Or)
          fail(CheckCode::ShapeMismatch, refs[0].pos, refs[0].label + " is not a disjunction", "", to_string(d.formula));
        const Closed& s1 = subproof(refs[1]);
        const Closed& s2 = subproof(refs[2]);
        const auto& h1 = single_hypothesis(l, 1, s1);
        const auto& h2 = single_hypothesis(l, 2, s2);
        if (!alpha_equal(h1.formula, d.formula.lhs()))
          fail(CheckCode::ShapeMismatch, refs[1].pos, refs[1].label + " does not assume the left disjunct",
               to_string(d.formula.lhs()), to_string(h1.formula));
        if (!alpha_equal(h2.formula, d.formula.rhs()))
          fail(CheckCode::ShapeMismatch, refs[2].pos, refs[2].label + " does not assume the right disjunct",
               to_string(d.formula.rhs()), to_string(h2.formula));
        if (!alpha_equal(s1.result, st) || !alpha_equal(s2.result, st))
          fail(CheckCode::ResultMismatch, l.pos, "both branches must conclude the stated formula",
               to_string(alpha_equal(s1.result, st) ? s2.result : s1.result), to_string(st));
        return make_builtin(BuiltinRule::OrElim, st, {d.derivation, s1.derivation, s2.derivation},
                            {Discharge{}, Discharge{"", {}, {{h1.label, h1.formula}}, {}},
                             Discharge{"", {}, {{h2.label, h2.formula}}, {}}});
      }
      case BuiltinRule::ImpIntro:
      case BuiltinRule::ForallIntro: {
        arity(l, 1);
        const Closed& s = subproof(refs[0]);
        bool imp = l.just.builtin == BuiltinRule::ImpIntro;
        AssumptionKind first = s.assumptions.empty() ? AssumptionKind::Hypothesis : s.assumptions[0].kind;
        if (s.assumptions.empty() || (imp ? first == AssumptionKind::ForAny : first != AssumptionKind::ForAny))
          fail(CheckCode::ShapeMismatch, refs[0].pos,
               refs[0].label + (imp ? " must start with a hypothesis" : " must start with `for any'"));
        auto [f, d] = fold(s);
        if (!alpha_equal(f, st)) mismatch(l, "stated formula does not match subproof " + refs[0].label, f);
        return d;
      }
      case BuiltinRule::ImpElim: {
        arity(l, 2);
        Resolved a = formula_ref(l, 0), b = formula_ref(l, 1);
        if (a.formula.kind != Connective::Implies)
          fail(CheckCode::ShapeMismatch, refs[0].pos, refs[0].label + " is not an implication", "", to_string(a.formula));
        if (!alpha_equal(a.formula.lhs(), b.formula))
          fail(CheckCode::ShapeMismatch, refs[1].pos, refs[1].label + " is not the antecedent of " + refs[0].label,
               to_string(a.formula.lhs()), to_string(b.formula));
        if (!alpha_equal(a.formula.rhs(), st)) mismatch(l, "stated formula is not the consequent", a.formula.rhs());
        return make_builtin(BuiltinRule::ImpElim, st, {a.derivation, b.derivation});
      }
      case BuiltinRule::NotIntro: {
        arity(l, 1);
        const Closed& s = subproof(refs[0]);
        const auto& h = single_hypothesis(l, 0, s);
        if (s.result.kind != Connective::Bottom)
          fail(CheckCode::ShapeMismatch, refs[0].pos, refs[0].label + " does not conclude ⊥", "⊥", to_string(s.result));
        Formula expected = Formula::negate(h.formula);
        if (!alpha_equal(st, expected)) mismatch(l, "stated formula is not the negated hypothesis", expected);
        return make_builtin(BuiltinRule::NotIntro, st, {s.derivation}, {Discharge{"", {}, {{h.label, h.formula}}, {}}});
      }
      case BuiltinRule::NotElim: {
        arity(l, 2);
        Resolved a = formula_ref(l, 0), b = formula_ref(l, 1);
        if (b.formula.kind != Connective::Not || !alpha_equal(b.formula.parts[0], a.formula))
          fail(CheckCode::ShapeMismatch, refs[1].pos, refs[1].label + " is not the negation of " + refs[0].label,
               to_string(Formula::negate(a.formula)), to_string(b.formula));
        if (st.kind != Connective::Bottom) mismatch(l, "¬-elim concludes ⊥", Formula::bottom());
        return make_builtin(BuiltinRule::NotElim, st, {a.derivation, b.derivation});
      }
      case BuiltinRule::BotElim: {
        arity(l, 1);
        Resolved a = formula_ref(l, 0);
        if (a.formula.kind != Connective::Bottom)
          fail(CheckCode::ShapeMismatch, refs[0].pos, refs[0].label + " is not ⊥", "⊥", to_string(a.formula));
        return make_builtin(BuiltinRule::BotElim, st, {a.derivation});
      }
      case BuiltinRule::ForallElim: return forall_elim(l);
      case BuiltinRule::ExistsIntro: return exists_intro(l);
      case BuiltinRule::ExistsElim: return exists_elim(l);
    }
    fail(CheckCode::ShapeMismatch, l.pos, "unknown built-in rule");
  }

  const Sort& inductive(const std::string& sort, SourcePos pos) const {
    const Sort* s = sig_.find_sort(sort);
    if (!s || s->constructors.empty()) fail(CheckCode::NotUniversal, pos, "sort " + sort + " has no constructors");
    return *s;
  }

  // Pairs each constructor of `sort` with its case, in declaration order.
  std::vector<const Case*> match_cases(const Line& l, const Sort& sort) const {
    std::vector<const Case*> out(sort.constructors.size(), nullptr);
    for (const auto& c : l.just.cases) {
      if (c.by_rule) fail(CheckCode::ShapeMismatch, c.pos, "`case rule' only applies to case analysis on a fact");
      auto it = std::find_if(sort.constructors.begin(), sort.constructors.end(),
                             [&](const ConstructorSig& k) { return k.name == c.name; });
      if (it == sort.constructors.end())
        fail(CheckCode::UnknownConstructor, c.pos, c.name + " is not a constructor of " + sort.name);
      std::size_t i = static_cast<std::size_t>(it - sort.constructors.begin());
      if (out[i]) fail(CheckCode::DuplicateCase, c.pos, "case " + c.name + " appears twice");
      if (c.vars.size() != it->arity())
        fail(CheckCode::WrongArity, c.pos, c.name + " takes " + std::to_string(it->arity()) + " arguments");
      for (std::size_t k = 0; k < c.vars.size(); ++k)
        if (c.vars[k].sort != it->arg_sorts[k])
          fail(CheckCode::SortMismatch, c.pos, "argument " + std::to_string(k + 1) + " of " + c.name + " has sort " +
                                                   it->arg_sorts[k]);
      out[i] = &c;
    }
    for (std::size_t i = 0; i < out.size(); ++i)
      if (!out[i]) fail(CheckCode::MissingCase, l.pos, "missing case " + sort.constructors[i].name);
    return out;
  }

  void declared_hypotheses(const Case& c, const std::vector<Formula>& available, const std::string& what) const {
    if (!c.hypotheses.empty() && c.hypotheses.size() != available.size())
      fail(CheckCode::WrongArity, c.pos,
           "case " + c.name + " has " + std::to_string(available.size()) + " " + what + (available.size() == 1 ? "" : "s"));
    for (std::size_t i = 0; i < c.hypotheses.size(); ++i)
      if (!alpha_equal(c.hypotheses[i].formula, available[i]))
        fail(CheckCode::ShapeMismatch, c.hypotheses[i].pos, "this is not the " + what + " of case " + c.name,
             to_string(available[i]), to_string(c.hypotheses[i].formula));
  }

  std::pair<Formula, DerivationPtr> case_body(const Case& c, Discharge& dis) {
    Frame f;
    f.eigen = dis.eigenvars;
    f.rewrite = dis.refinement;
    frames_.push_back(std::move(f));
    for (const auto& h : c.hypotheses) {
      add_fact(Fact{h.label, h.formula, make_hypothesis(h.label, h.formula), nullptr}, h.pos);
      dis.hypotheses.emplace_back(h.label, h.formula);
    }
    auto r = steps(c.body, c.pos);
    pop();
    return r;
  }

  void case_result(const Case& c, const Formula& got, const Formula& expected) const {
    if (!alpha_equal(got, expected))
      fail(CheckCode::WrongCaseResult, c.pos, "case " + c.name + " does not conclude its goal", to_string(expected),
           to_string(got));
  }

  DerivationPtr induction(const Line& l) {
    const Formula& st = l.formula;
    if (st.kind != Connective::Forall) fail(CheckCode::NotUniversal, l.pos, "induction needs a ∀ goal", "", to_string(st));
    const Sort& sort = inductive(st.sort, l.pos);
    auto cases = match_cases(l, sort);
    auto node = std::make_shared<Derivation>();
    node->kind = RuleKind::Induction;
    node->conclusion = st;
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const Case& c = *cases[i];
      fresh(c.vars, {st}, c.pos);
      std::vector<Formula> ihs;
      for (const auto& v : c.vars)
        if (v.sort == st.sort) ihs.push_back(instantiate(st, Term::rigid(v.name, v.sort)));
      declared_hypotheses(c, ihs, "induction hypothesis");
      Discharge dis{c.name, c.vars, {}, {}};
      auto [got, d] = case_body(c, dis);
      case_result(c, got, instantiate(st, pattern_term(c.name, sort.name, c.vars)));
      node->premises.push_back(d);
      node->discharges.push_back(std::move(dis));
    }
    return node;
  }

  DerivationPtr case_analysis(const Line& l) {
    const Formula& st = l.formula;
    const Term& x = *l.just.scrutinee;
    const Binder* b = x.kind == TermKind::Rigid ? find_eigen(x.name) : nullptr;
    if (!b) fail(CheckCode::ScrutineeNotInScope, l.pos, to_string(x) + " is not a variable in scope");
    const Sort& sort = inductive(b->sort, l.pos);
    auto cases = match_cases(l, sort);
    auto node = std::make_shared<Derivation>();
    node->kind = RuleKind::CaseAnalysis;
    node->conclusion = st;
    node->scrutinee = Term::rigid(b->name, b->sort);
    for (std::size_t i = 0; i < cases.size(); ++i) {
      const Case& c = *cases[i];
      if (!c.hypotheses.empty())
        fail(CheckCode::WrongArity, c.hypotheses[0].pos, "case analysis on a variable adds no hypotheses");
      fresh(c.vars, {st}, c.pos);
      Term pat = pattern_term(c.name, sort.name, c.vars);
      Discharge dis{c.name, c.vars, {}, {{b->name, pat}}};
      auto [got, d] = case_body(c, dis);
      case_result(c, got, replace_free(st, b->name, pat));
      node->premises.push_back(d);
      node->discharges.push_back(std::move(dis));
    }
    return node;
  }

  DerivationPtr inversion(const Line& l) {
    const Formula& st = l.formula;
    const Ref& ref = *l.just.fact;
    Resolved fact = resolve(ref);
    if (!fact.formula.is_literal())
      fail(CheckCode::ShapeMismatch, ref.pos, ref.label + " is not a judgment", "", to_string(fact.formula));
    std::vector<const Schema*> expected;
    for (const auto& r : lib_.rules)
      if (invert(fact.formula, r, {})) expected.push_back(&r);
    std::map<std::string, const Case*> given;
    for (const auto& c : l.just.cases) {
      if (!c.by_rule) fail(CheckCode::ShapeMismatch, c.pos, "cases on a fact name rules: `case rule NAME ->'");
      if (!lib_.find_rule(c.name)) fail(CheckCode::UnknownRule, c.pos, "no rule " + c.name);
      if (given.count(c.name)) fail(CheckCode::DuplicateCase, c.pos, "case " + c.name + " appears twice");
      bool possible = std::any_of(expected.begin(), expected.end(), [&](const Schema* s) { return s->name == c.name; });
      if (!possible)
        fail(CheckCode::ImpossibleCase, c.pos, "rule " + c.name + " cannot conclude " + quote(fact.formula));
      given[c.name] = &c;
    }
    for (const Schema* s : expected)
      if (!given.count(s->name)) fail(CheckCode::MissingCase, l.pos, "missing case rule " + s->name);

    auto node = std::make_shared<Derivation>();
    node->kind = RuleKind::Inversion;
    node->conclusion = st;
    node->premises.push_back(fact.derivation);
    node->discharges.emplace_back();
    for (const Schema* s : expected) {
      const Case& c = *given[s->name];
      auto inv = invert(fact.formula, *s, c.vars);
      if (!inv->named)
        fail(CheckCode::WrongArity, c.pos,
             "case rule " + c.name + " must name " + std::to_string(inv->var_sorts.size()) + " variable(s)");
      fresh(c.vars, {st, fact.formula}, c.pos);
      declared_hypotheses(c, inv->premises, "premise");
      Discharge dis{c.name, c.vars, {}, inv->refinement};
      auto [got, d] = case_body(c, dis);
      case_result(c, got, rewrite_formula(st, inv->refinement));
      node->premises.push_back(d);
      node->discharges.push_back(std::move(dis));
    }
    return node;
  }

 public:
  SearchEnv env() const {
    SearchEnv e;
    e.signature = &sig_;
    e.library = lib_;
    e.facts = visible_facts();
    e.eigenvariables = eigen_in_scope();
    for (const auto& f : e.facts)
      if (!f.label.empty()) e.labels.push_back(f.label);
    return e;
  }

 private:
  DerivationPtr prove(const Line& l) {
    if (!opts_.search) fail(CheckCode::AutoDisabled, l.pos, "automatic proving is disabled");
    ProveResult r = opts_.search(l.formula, env());
    if (!r.derivation) {
      CheckError e;
      e.code = CheckCode::SearchStuck;
      e.pos = l.pos;
      e.message = "search could not prove " + quote(l.formula);
      e.actual = to_string(l.formula);
      e.trace = r.failure;
      throw Failure{e};
    }
    return r.derivation;
  }
};

}  // namespace

BlockResult check_block(const Block& block, const SearchEnv& env, const CheckOptions& opts) {
  static const Signature empty;
  Checker c(env.signature ? *env.signature : empty, env.library, opts);
  c.seed(env.facts, env.eigenvariables);
  BlockResult out;
  try {
    auto [f, d] = c.block(block, block.empty() ? SourcePos{} : block.front().pos());
    out.result = f;
    out.derivation = d;
  } catch (const Failure& f) {
    out.error = f.error;
  }
  return out;
}

Library library_before(const ModuleAST& module, std::string_view name, const Report* report, bool assume_failed) {
  Library lib;
  for (const auto& d : module.decls) {
    if (const auto* r = std::get_if<RuleDecl>(&d)) lib.rules.push_back(schema_of(*r));
    if (const auto* t = std::get_if<TheoremDecl>(&d)) {
      if (t->name == name) break;
      bool ok = true;
      if (report && !assume_failed)
        for (const auto& tr : report->theorems)
          if (tr.name == t->name) ok = tr.proved;
      if (ok) lib.theorems.push_back(schema_of(*t));
    }
  }
  return lib;
}

Report check_module(const ModuleAST& module, const CheckOptions& opts) {
  Report report;
  Library lib;
  for (const auto& decl : module.decls) {
    if (const auto* r = std::get_if<RuleDecl>(&decl)) {
      lib.rules.push_back(schema_of(*r));
      continue;
    }
    const auto* t = std::get_if<TheoremDecl>(&decl);
    if (!t) continue;
    TheoremReport tr;
    tr.name = t->name;
    tr.pos = t->pos;
    Substitution rigid;
    for (const auto& p : t->params) rigid.bind_schematic(p.name, Term::rigid(p.name, p.sort));
    Formula target = substitute(t->target(), rigid);
    SearchEnv env;
    env.signature = &module.signature;
    env.library = lib;
    env.eigenvariables = t->params;
    BlockResult br = check_block(t->proof, env, opts);
    if (br.error) {
      tr.error = br.error;
    } else if (!alpha_equal(br.result, target)) {
      CheckError e;
      e.code = CheckCode::ResultMismatch;
      e.pos = t->proof.empty() ? t->pos : t->proof.back().pos();
      e.message = "the proof of " + t->name + " does not conclude its statement";
      e.expected = to_string(target);
      e.actual = to_string(br.result);
      tr.error = e;
    } else if (auto bad = validate(br.derivation, module.signature, lib, {}, t->params)) {
      CheckError e;
      e.code = CheckCode::InvalidDerivation;
      e.pos = t->pos;
      e.message = *bad;
      tr.error = e;
    } else {
      tr.proved = true;
      tr.derivation = br.derivation;
    }
    if (tr.proved || opts.assume_failed) lib.theorems.push_back(schema_of(*t));
    report.theorems.push_back(std::move(tr));
  }
  return report;
}

}  // namespace fitchmi
