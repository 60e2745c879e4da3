#include "fitchmi/derivation.hpp"

#include <functional>

namespace fitchmi {

Schema schema_of(const RuleDecl& r) { return Schema{r.name, r.params, {}, r.premises, r.conclusion}; }

Schema schema_of(const TheoremDecl& t) { return Schema{t.name, t.params, t.prop_params, t.premises, t.conclusion}; }

namespace {

const Schema* find_in(const std::vector<Schema>& v, std::string_view name) {
  for (const auto& s : v)
    if (s.name == name) return &s;
  return nullptr;
}

}  // namespace

const Schema* Library::find_rule(std::string_view name) const { return find_in(rules, name); }
const Schema* Library::find_theorem(std::string_view name) const { return find_in(theorems, name); }

std::string_view to_string(RuleKind k) {
  switch (k) {
    case RuleKind::Hypothesis: return "hypothesis";
    case RuleKind::BuiltIn: return "built-in";
    case RuleKind::UserRule: return "rule";
    case RuleKind::Theorem: return "theorem";
    case RuleKind::Induction: return "induction";
    case RuleKind::CaseAnalysis: return "case analysis";
    case RuleKind::Inversion: return "case analysis on a fact";
    case RuleKind::Gap: return "gap";
  }
  return "?";
}

std::size_t Derivation::size() const {
  std::size_t n = 1;
  for (const auto& p : premises) n += p->size();
  return n;
}

DerivationPtr make_hypothesis(std::string label, Formula f) {
  auto d = std::make_shared<Derivation>();
  d->kind = RuleKind::Hypothesis;
  d->name = std::move(label);
  d->conclusion = std::move(f);
  return d;
}

DerivationPtr make_builtin(BuiltinRule r, Formula conclusion, std::vector<DerivationPtr> premises,
                           std::vector<Discharge> discharges, std::optional<Term> witness) {
  auto d = std::make_shared<Derivation>();
  d->kind = RuleKind::BuiltIn;
  d->builtin = r;
  d->name = std::string(builtin_name(r));
  d->conclusion = std::move(conclusion);
  d->premises = std::move(premises);
  d->discharges = std::move(discharges);
  d->witness = std::move(witness);
  return d;
}

DerivationPtr make_gap(Formula goal) {
  auto d = std::make_shared<Derivation>();
  d->kind = RuleKind::Gap;
  d->conclusion = std::move(goal);
  return d;
}

namespace {

using FormulaMap = std::function<Formula(const Formula&)>;
using TermMap = std::function<Term(const Term&)>;

DerivationPtr map_derivation(const DerivationPtr& d, const FormulaMap& ff, const TermMap& tf) {
  auto out = std::make_shared<Derivation>(*d);
  out->conclusion = ff(d->conclusion);
  Substitution inst;
  for (const auto& [k, v] : d->instantiation.schematics()) inst.bind_schematic(k, tf(v));
  for (const auto& [k, v] : d->instantiation.props()) inst.bind_prop(k, ff(v));
  out->instantiation = std::move(inst);
  if (d->witness) out->witness = tf(*d->witness);
  if (d->scrutinee) out->scrutinee = tf(*d->scrutinee);
  for (auto& p : out->premises) p = map_derivation(p, ff, tf);
  for (auto& dis : out->discharges) {
    for (auto& h : dis.hypotheses) h.second = ff(h.second);
    for (auto& r : dis.refinement) r.second = tf(r.second);
  }
  return out;
}

}  // namespace

Formula rewrite_formula(const Formula& f, const std::vector<std::pair<std::string, Term>>& refinement) {
  Formula out = f;
  for (const auto& [x, t] : refinement) out = replace_free(out, x, t);
  return out;
}

DerivationPtr rewrite_derivation(const DerivationPtr& d, const std::vector<std::pair<std::string, Term>>& refinement) {
  if (refinement.empty()) return d;
  return map_derivation(
      d, [&](const Formula& f) { return rewrite_formula(f, refinement); },
      [&](const Term& t) {
        Term out = t;
        for (const auto& [x, v] : refinement) out = replace_free(out, x, v);
        return out;
      });
}

DerivationPtr substitute_derivation(const DerivationPtr& d, const Substitution& s) {
  return map_derivation(
      d, [&](const Formula& f) { return substitute(f, s); }, [&](const Term& t) { return substitute(t, s); });
}

bool has_gaps(const DerivationPtr& d) {
  if (d->kind == RuleKind::Gap) return true;
  for (const auto& p : d->premises)
    if (has_gaps(p)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Inversion

namespace {

void rigids_in_order(const Term& t, std::vector<Binder>& out) {
  if (t.kind == TermKind::Rigid) {
    for (const auto& b : out)
      if (b.name == t.name) return;
    out.push_back({t.name, t.sort});
  }
  for (const auto& a : t.args) rigids_in_order(a, out);
}

void metas_in_order(const Term& t, std::vector<std::pair<int, std::string>>& out) {
  if (t.kind == TermKind::Meta) {
    for (const auto& m : out)
      if (m.first == t.meta) return;
    out.emplace_back(t.meta, t.sort);
  }
  for (const auto& a : t.args) metas_in_order(a, out);
}

}  // namespace

std::optional<Inversion> invert(const Formula& fact, const Schema& rule, const std::vector<Binder>& names) {
  if (!fact.is_literal() || !rule.conclusion.is_literal() || fact.name != rule.conclusion.name) return std::nullopt;

  std::vector<Binder> eigen;
  for (const auto& a : fact.args) rigids_in_order(a, eigen);
  MetaSupply supply;
  Formula flex = fact;
  for (const auto& e : eigen) flex = replace_free(flex, e.name, fresh_meta(supply, e.sort));
  const int first_rule_meta = supply.peek();

  Substitution fresh = freshening(rule.params, rule.props, supply);
  auto u = unify(substitute(rule.conclusion, fresh), flex);
  if (!u) return std::nullopt;
  const Substitution& theta = *u.unifier;

  std::vector<std::pair<int, std::string>> leftover;
  for (const auto& p : rule.params) {
    std::vector<std::pair<int, std::string>> found;
    metas_in_order(substitute(*fresh.schematic(p.name), theta), found);
    for (const auto& m : found) {
      if (m.first < first_rule_meta) continue;
      bool seen = false;
      for (const auto& l : leftover) seen = seen || l.first == m.first;
      if (!seen) leftover.push_back(m);
    }
  }

  Inversion out;
  for (const auto& l : leftover) out.var_sorts.push_back(l.second);
  out.named = names.size() == leftover.size();
  for (std::size_t i = 0; out.named && i < names.size(); ++i) out.named = names[i].sort == leftover[i].second;
  if (!out.named) return out;

  Substitution back;
  for (std::size_t i = 0; i < eigen.size(); ++i)
    if (!theta.meta(static_cast<int>(i))) back.bind_meta(static_cast<int>(i), Term::rigid(eigen[i].name, eigen[i].sort));
  for (std::size_t i = 0; i < leftover.size(); ++i)
    back.bind_meta(leftover[i].first, Term::rigid(names[i].name, names[i].sort));

  for (std::size_t i = 0; i < eigen.size(); ++i) {
    Term t = substitute(substitute(Term::metavar(static_cast<int>(i), eigen[i].sort), theta), back);
    if (!(t.kind == TermKind::Rigid && t.name == eigen[i].name)) out.refinement.emplace_back(eigen[i].name, t);
  }
  for (const auto& p : rule.premises) out.premises.push_back(substitute(substitute(substitute(p, fresh), theta), back));
  return out;
}

}  // namespace fitchmi
