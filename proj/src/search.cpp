#include "fitchmi/search.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace fitchmi {

std::string_view to_string(StepKind k) {
  switch (k) {
    case StepKind::PickedInduction: return "induction";
    case StepKind::EnteredCase: return "case";
    case StepKind::SplitConjunction: return "split-conjunction";
    case StepKind::ChoseDisjunct: return "disjunct";
    case StepKind::AssumedPremise: return "assume";
    case StepKind::InstantiatedExistential: return "instantiate";
    case StepKind::TriedEnvMatch: return "env-match";
    case StepKind::CommittedRule: return "rule";
    case StepKind::CommittedTheorem: return "theorem";
    case StepKind::DepthLimit: return "depth-limit";
    case StepKind::Failed: return "failed";
  }
  return "?";
}

std::string subscript(int n) {
  static const char* digits[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};
  std::string s = std::to_string(n), out;
  for (char c : s) out += digits[c - '0'];
  return out;
}

std::string fresh_indexed(const std::string& base, const std::vector<std::string>& taken) {
  for (int k = 1;; ++k) {
    std::string name = base + subscript(k);
    if (std::find(taken.begin(), taken.end(), name) == taken.end()) return name;
  }
}

namespace {

struct Scope {
  std::vector<EnvFact> facts;  // innermost first
  std::vector<Binder> eigen;
  std::vector<std::string> labels;
  std::vector<LabelledFormula> ihs;
};

class Searcher {
 public:
  Searcher(const SearchEnv& env, SearchOptions opts) : env_(env), opts_(opts) {}

  SearchOutcome run(const Formula& goal) {
    Scope root{env_.facts, env_.eigenvariables, env_.labels, {}};
    DerivationPtr d = solve(goal, root, 0);
    SearchOutcome out;
    out.log = log_;
    if (!d && opts_.allow_holes && !has_metas(goal)) {
      holes_.clear();
      holes_.push_back(hole(goal, root));
      d = make_gap(goal);
    }
    if (!d) {
      out.kind = SearchOutcome::Kind::Stuck;
      out.trace = failure_trace_;
      out.stuck_goal = failure_goal_;
      return out;
    }
    Substitution ground = grounding(substitute_derivation(d, subst_));
    out.derivation = substitute_derivation(substitute_derivation(d, subst_), ground);
    out.substitution = subst_;
    out.kind = holes_.empty() ? SearchOutcome::Kind::Proved : SearchOutcome::Kind::Partial;
    for (auto& h : holes_) {
      h.goal = substitute(h.goal, subst_);
      for (auto& f : h.env.facts) f.formula = substitute(f.formula, subst_);
    }
    out.holes = std::move(holes_);
    return out;
  }

 private:
  const SearchEnv& env_;
  SearchOptions opts_;
  MetaSupply supply_;
  Substitution subst_;
  std::map<int, std::set<std::string>> meta_scope_;
  std::vector<TraceStep> path_;
  std::vector<TraceStep> log_;
  int level_ = 0;
  std::vector<Hole> holes_;
  std::vector<TraceStep> failure_trace_;
  Formula failure_goal_;

  const Signature& sig() const { return *env_.signature; }

  struct Push {
    std::vector<TraceStep>& path;
    std::size_t size;
    Push(Searcher& owner, TraceStep s) : path(owner.path_), size(path.size()) {
      owner.log_.push_back(s);
      path.push_back(std::move(s));
    }
    ~Push() { path.resize(size); }
  };

  TraceStep step(StepKind k, const Formula& goal) const {
    TraceStep s;
    s.kind = k;
    s.level = level_;
    s.goal = substitute(goal, subst_);
    return s;
  }

  DerivationPtr fail(const Formula& goal, StepKind kind, const std::string& why) {
    failure_trace_ = path_;
    TraceStep s = step(kind, goal);
    s.detail = why;
    failure_trace_.push_back(s);
    log_.push_back(s);
    failure_goal_ = substitute(goal, subst_);
    return nullptr;
  }

  static std::set<std::string> names(const std::vector<Binder>& eigen) {
    std::set<std::string> out;
    for (const auto& b : eigen) out.insert(b.name);
    return out;
  }

  void register_metas(int from, const Scope& scope) {
    auto allowed = names(scope.eigen);
    for (int id = from; id < supply_.peek(); ++id) meta_scope_[id] = allowed;
  }

  Term fresh(const std::string& sort, const Scope& scope) {
    int from = supply_.peek();
    Term t = fresh_meta(supply_, sort);
    register_metas(from, scope);
    return t;
  }

  // A metavariable may only be bound to terms over eigenvariables that were
  // in scope when it was created.
  bool scoped(const Substitution& s) const {
    for (const auto& [id, t] : s.metas()) {
      auto it = meta_scope_.find(id);
      if (it == meta_scope_.end()) continue;
      for (const auto& x : free_rigids(t))
        if (!it->second.count(x)) return false;
    }
    return true;
  }

  bool unify_into(const Formula& a, const Formula& b) {
    auto u = unify(a, b, subst_);
    if (!u || !scoped(*u.unifier)) return false;
    subst_ = *u.unifier;
    return true;
  }

  DerivationPtr solve(const Formula& goal, const Scope& scope, int depth) {
    Formula g = substitute(goal, subst_);
    switch (g.kind) {
      case Connective::Pred: return literal(g, scope, depth);
      case Connective::And: {
        Push p(*this, step(StepKind::SplitConjunction, g));
        DerivationPtr l = solve(g.lhs(), scope, depth);
        if (!l) return nullptr;
        DerivationPtr r = solve(g.rhs(), scope, depth);
        if (!r) return nullptr;
        return make_builtin(BuiltinRule::AndIntro, g, {l, r});
      }
      case Connective::Or: {
        Substitution saved = subst_;
        std::size_t holes = holes_.size();
        for (int side = 0; side < 2; ++side) {
          TraceStep s = step(StepKind::ChoseDisjunct, g);
          s.var = side == 0 ? "left" : "right";
          Push p(*this, s);
          DerivationPtr d = solve(g.parts[side], scope, depth);
          if (d) return make_builtin(BuiltinRule::OrIntro, g, {d});
          subst_ = saved;
          holes_.resize(holes);
        }
        return nullptr;
      }
      case Connective::Implies: {
        Scope inner = scope;
        std::string label = fresh_indexed("h", scope.labels);
        inner.labels.push_back(label);
        inner.facts.insert(inner.facts.begin(), EnvFact{label, g.lhs(), make_hypothesis(label, g.lhs())});
        TraceStep s = step(StepKind::AssumedPremise, g);
        s.var = label;
        Push p(*this, s);
        DerivationPtr d = solve(g.rhs(), inner, depth);
        if (!d) return nullptr;
        return make_builtin(BuiltinRule::ImpIntro, g, {d}, {Discharge{"", {}, {{label, g.lhs()}}, {}}});
      }
      case Connective::Exists: {
        Term m = fresh(g.sort, scope);
        TraceStep s = step(StepKind::InstantiatedExistential, g);
        s.var = g.name;
        s.detail = to_string(m);
        Push p(*this, s);
        DerivationPtr d = solve(instantiate(g, m), scope, depth);
        if (!d) return nullptr;
        return make_builtin(BuiltinRule::ExistsIntro, g, {d}, {}, m);
      }
      case Connective::Forall: return induction(g, scope, depth);
      default: return fail(g, StepKind::Failed, "no strategy for this kind of goal");
    }
  }

  DerivationPtr literal(const Formula& g, const Scope& scope, int depth) {
    if (depth > opts_.max_depth) return fail(g, StepKind::DepthLimit, "depth limit " + std::to_string(opts_.max_depth));

    for (const auto& f : scope.facts) {
      Formula fact = substitute(f.formula, subst_);
      if (!fact.is_literal() || !unify_into(g, fact)) continue;
      TraceStep s = step(StepKind::TriedEnvMatch, g);
      s.name = f.label;
      s.detail = "matched";
      log_.push_back(s);
      if (f.label.empty() || !f.derivation || f.derivation->kind == RuleKind::Hypothesis) return f.derivation;
      auto cited = std::make_shared<Derivation>(*f.derivation);
      cited->cite = f.label;
      return cited;
    }

    for (const auto& r : env_.library.rules) {
      int from = supply_.peek();
      Substitution inst = freshening(r.params, r.props, supply_);
      register_metas(from, scope);
      if (!unify_into(substitute(r.conclusion, inst), g)) continue;
      TraceStep s = step(StepKind::CommittedRule, g);
      s.name = r.name;
      Push p(*this, s);
      std::vector<DerivationPtr> premises;
      for (const auto& pr : r.premises) {
        DerivationPtr d = solve(substitute(pr, inst), scope, depth + 1);
        if (!d) return nullptr;
        premises.push_back(d);
      }
      auto node = std::make_shared<Derivation>();
      node->kind = RuleKind::UserRule;
      node->name = r.name;
      node->conclusion = g;
      node->instantiation = inst;
      node->premises = std::move(premises);
      return node;
    }

    for (const auto& t : env_.library.theorems) {
      int from = supply_.peek();
      Substitution inst = freshening(t.params, t.props, supply_);
      register_metas(from, scope);
      Formula cur = substitute(t.conclusion, inst);
      std::vector<Term> witnesses;
      while (cur.kind == Connective::Forall) {
        Term m = fresh(cur.sort, scope);
        witnesses.push_back(m);
        cur = instantiate(cur, m);
      }
      std::vector<Formula> antecedents;
      Formula body = cur;
      while (body.kind == Connective::Implies) {
        antecedents.push_back(body.lhs());
        Formula next = body.rhs();
        body = next;
      }
      if (!body.is_literal() && body.kind != Connective::PropMeta) continue;
      if (!unify_into(body, g)) continue;
      TraceStep s = step(StepKind::CommittedTheorem, g);
      s.name = t.name;
      Push p(*this, s);
      std::vector<DerivationPtr> premises;
      for (const auto& pr : t.premises) {
        DerivationPtr d = solve(substitute(pr, inst), scope, depth + 1);
        if (!d) return nullptr;
        premises.push_back(d);
      }
      auto node = std::make_shared<Derivation>();
      node->kind = RuleKind::Theorem;
      node->name = t.name;
      node->conclusion = substitute(t.conclusion, inst);
      node->instantiation = inst;
      node->premises = std::move(premises);
      DerivationPtr d = node;
      Formula level = node->conclusion;
      for (const auto& w : witnesses) {
        level = instantiate(level, w);
        d = make_builtin(BuiltinRule::ForallElim, level, {d}, {}, w);
      }
      for (const auto& a : antecedents) {
        DerivationPtr da = solve(a, scope, depth + 1);
        if (!da) return nullptr;
        level = level.rhs();
        d = make_builtin(BuiltinRule::ImpElim, level, {d, da});
      }
      return d;
    }
    return fail(g, StepKind::Failed, "no fact, rule or theorem applies");
  }

  Hole hole(const Formula& goal, const Scope& scope) const {
    Hole h;
    h.goal = substitute(goal, subst_);
    h.env.signature = env_.signature;
    h.env.library = env_.library;
    h.env.facts = scope.facts;
    h.env.eigenvariables = scope.eigen;
    h.env.labels = scope.labels;
    h.trace = path_;
    h.hypotheses = scope.ihs;
    return h;
  }

  DerivationPtr induction(const Formula& g, const Scope& scope, int depth) {
    if (depth > opts_.max_depth) return fail(g, StepKind::DepthLimit, "depth limit " + std::to_string(opts_.max_depth));
    const Sort* sort = sig().find_sort(g.sort);
    if (!sort || sort->constructors.empty()) return fail(g, StepKind::Failed, "sort " + g.sort + " is not inductive");
    TraceStep pick = step(StepKind::PickedInduction, g);
    pick.var = g.name;
    pick.sort = g.sort;
    Push p(*this, pick);

    auto node = std::make_shared<Derivation>();
    node->kind = RuleKind::Induction;
    node->conclusion = g;
    for (const auto& c : sort->constructors) {
      Scope inner = scope;
      std::vector<std::string> taken;
      for (const auto& b : scope.eigen) taken.push_back(b.name);
      for (const auto& x : free_rigids(g)) taken.push_back(x);
      std::vector<Binder> vars;
      std::vector<Term> args;
      for (const auto& s : c.arg_sorts) {
        std::string name = fresh_indexed(s == "ℕ" ? "m" : "x", taken);
        taken.push_back(name);
        vars.push_back({name, s});
        args.push_back(Term::rigid(name, s));
      }
      inner.eigen.insert(inner.eigen.end(), vars.begin(), vars.end());
      std::size_t recursive = std::count(c.arg_sorts.begin(), c.arg_sorts.end(), g.sort);
      std::string base = recursive ? fresh_indexed("ind-hyp", scope.labels) : "";
      std::vector<LabelledFormula> ihs;
      int k = 0;
      for (const auto& v : vars) {
        if (v.sort != g.sort) continue;
        ++k;
        std::string label = recursive > 1 ? base + "-" + std::to_string(k) : base;
        ihs.emplace_back(label, instantiate(g, Term::rigid(v.name, v.sort)));
      }
      for (const auto& [label, f] : ihs) {
        inner.labels.push_back(label);
        inner.facts.insert(inner.facts.begin(), EnvFact{label, f, make_hypothesis(label, f)});
        inner.ihs.emplace_back(label, substitute(f, subst_));
      }
      Term pattern = Term::ctor(c.name, sort->name, args);
      Formula case_goal = instantiate(g, pattern);

      TraceStep enter = step(StepKind::EnteredCase, case_goal);
      enter.var = g.name;
      enter.sort = g.sort;
      enter.pattern = to_string(pattern);
      for (const auto& [label, f] : ihs) enter.hypotheses.emplace_back(label, substitute(f, subst_));
      Push q(*this, enter);

      Substitution saved = subst_;
      std::size_t holes = holes_.size();
      ++level_;
      DerivationPtr d = solve(case_goal, inner, depth + 1);
      --level_;
      if (!d) {
        Formula now = substitute(case_goal, subst_);
        if (!opts_.allow_holes || has_metas(substitute(case_goal, saved))) return nullptr;
        subst_ = saved;
        holes_.resize(holes);
        holes_.push_back(hole(now, inner));
        d = make_gap(now);
      }
      node->premises.push_back(d);
      node->discharges.push_back(Discharge{c.name, vars, ihs, {}});
    }
    return node;
  }

  static void metas_in(const DerivationPtr& d, std::map<int, std::string>& out) {
    std::function<void(const Term&)> term = [&](const Term& t) {
      if (t.kind == TermKind::Meta) out.emplace(t.meta, t.sort);
      for (const auto& a : t.args) term(a);
    };
    std::function<void(const Formula&)> formula = [&](const Formula& f) {
      if (f.kind == Connective::PropMeta) out.emplace(f.meta, "");
      for (const auto& t : f.args) term(t);
      for (const auto& p : f.parts) formula(p);
    };
    formula(d->conclusion);
    if (d->witness) term(*d->witness);
    for (const auto& [k, v] : d->instantiation.schematics()) term(v);
    for (const auto& [k, v] : d->instantiation.props()) formula(v);
    for (const auto& dis : d->discharges)
      for (const auto& h : dis.hypotheses) formula(h.second);
    for (const auto& p : d->premises) metas_in(p, out);
  }

  // Metavariables nothing constrained get the smallest closed term of
  // their sort (proposition metavariables: ⊥).
  Substitution grounding(const DerivationPtr& d) const {
    std::map<int, std::string> metas;
    metas_in(d, metas);
    Substitution g;
    for (const auto& [id, sort] : metas) {
      if (sort.empty()) {
        g.bind_prop_meta(id, Formula::bottom());
      } else if (auto t = sig().ground_term(sort)) {
        g.bind_meta(id, *t);
      }
    }
    return g;
  }
};

}  // namespace

SearchOutcome search(const Formula& goal, const SearchEnv& env, SearchOptions opts) {
  static const Signature empty;
  SearchEnv e = env;
  if (!e.signature) e.signature = &empty;
  return Searcher(e, opts).run(goal);
}

std::string render_trace(const std::vector<TraceStep>& trace) {
  std::ostringstream out;
  int n = 0;
  for (const auto& s : trace) {
    if (s.kind != StepKind::PickedInduction && s.kind != StepKind::EnteredCase) continue;
    std::string indent(static_cast<std::size_t>(2 * s.level), ' ');
    std::string cont = indent + "    ";
    if (n > 0) out << "\n";
    ++n;
    out << indent << n << ")  ";
    if (s.kind == StepKind::PickedInduction) {
      out << "goal: `" << to_string(s.goal) << "'\n";
      out << cont << "strategy: induction\n";
    } else {
      out << "case " << s.var << " := " << s.pattern << "\n";
      out << cont << "goal: `" << to_string(s.goal) << "'\n";
      for (const auto& [label, f] : s.hypotheses) out << cont << "ind. hypothesis: `" << label << " : " << to_string(f) << "'\n";
    }
  }
  return out.str();
}

std::string render_prompt(const std::string& theorem, const std::vector<TraceStep>& trace, const Formula& goal) {
  std::string out = "I am solving a theorem `" + theorem + "'\n\n";
  std::string t = render_trace(trace);
  if (!t.empty()) out += t + "\n";
  out += "My goal is: `" + to_string(goal) + "'.\n";
  out += "Type a command or a proof:\n";
  return out;
}

}  // namespace fitchmi
