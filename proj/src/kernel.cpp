#include "fitchmi/kernel.hpp"

#include <algorithm>

namespace fitchmi {

// ---------------------------------------------------------------------------
// Construction

Term Term::rigid(std::string name, std::string sort) {
  return Term{TermKind::Rigid, std::move(name), std::move(sort), -1, {}};
}

Term Term::schematic(std::string name, std::string sort) {
  return Term{TermKind::Schematic, std::move(name), std::move(sort), -1, {}};
}

Term Term::metavar(int id, std::string sort) { return Term{TermKind::Meta, "", std::move(sort), id, {}}; }

Term Term::ctor(std::string name, std::string sort, std::vector<Term> args) {
  return Term{TermKind::Ctor, std::move(name), std::move(sort), -1, std::move(args)};
}

Formula Formula::pred(std::string name, std::vector<Term> args) {
  Formula f;
  f.kind = Connective::Pred;
  f.name = std::move(name);
  f.args = std::move(args);
  return f;
}

namespace {

Formula binary(Connective kind, Formula a, Formula b) {
  Formula f;
  f.kind = kind;
  f.parts.push_back(std::move(a));
  f.parts.push_back(std::move(b));
  return f;
}

Formula binder(Connective kind, std::string var, std::string sort, Formula body) {
  Formula f;
  f.kind = kind;
  f.name = std::move(var);
  f.sort = std::move(sort);
  f.parts.push_back(std::move(body));
  return f;
}

}  // namespace

Formula Formula::conj(Formula a, Formula b) { return binary(Connective::And, std::move(a), std::move(b)); }
Formula Formula::disj(Formula a, Formula b) { return binary(Connective::Or, std::move(a), std::move(b)); }
Formula Formula::implies(Formula a, Formula b) { return binary(Connective::Implies, std::move(a), std::move(b)); }

Formula Formula::negate(Formula a) {
  Formula f;
  f.kind = Connective::Not;
  f.parts.push_back(std::move(a));
  return f;
}

Formula Formula::forall(std::string var, std::string sort, Formula body) {
  return binder(Connective::Forall, std::move(var), std::move(sort), std::move(body));
}

Formula Formula::exists(std::string var, std::string sort, Formula body) {
  return binder(Connective::Exists, std::move(var), std::move(sort), std::move(body));
}

Formula Formula::prop(std::string name) {
  Formula f;
  f.kind = Connective::PropParam;
  f.name = std::move(name);
  return f;
}

Formula Formula::prop_meta(int id) {
  Formula f;
  f.kind = Connective::PropMeta;
  f.meta = id;
  return f;
}

Formula Formula::bottom() { return Formula{}; }

// ---------------------------------------------------------------------------
// Signature

void Signature::add_sort(Sort sort) {
  if (find_sort(sort.name)) throw SignatureError("sort '" + sort.name + "' is already declared");
  std::set<std::string> local;
  for (const auto& c : sort.constructors) {
    if (ctor_index_.count(c.name) || !local.insert(c.name).second)
      throw SignatureError("constructor '" + c.name + "' is already declared");
    for (const auto& arg : c.arg_sorts) {
      if (arg != sort.name && !find_sort(arg))
        throw SignatureError("constructor '" + c.name + "' uses undeclared sort '" + arg + "'");
    }
  }
  std::size_t si = sorts_.size();
  for (std::size_t ci = 0; ci < sort.constructors.size(); ++ci) ctor_index_[sort.constructors[ci].name] = {si, ci};
  sorts_.push_back(std::move(sort));
}

const Sort* Signature::find_sort(std::string_view name) const {
  for (const auto& s : sorts_)
    if (s.name == name) return &s;
  return nullptr;
}

const ConstructorSig* Signature::find_constructor(std::string_view name) const {
  auto it = ctor_index_.find(name);
  if (it == ctor_index_.end()) return nullptr;
  return &sorts_[it->second.first].constructors[it->second.second];
}

const std::string* Signature::constructor_sort(std::string_view name) const {
  auto it = ctor_index_.find(name);
  if (it == ctor_index_.end()) return nullptr;
  return &sorts_[it->second.first].name;
}

bool Signature::declare_predicate(const std::string& name, const std::vector<std::string>& arg_sorts) {
  auto [it, inserted] = predicates_.emplace(name, arg_sorts);
  return inserted || it->second == arg_sorts;
}

const std::vector<std::string>* Signature::predicate(std::string_view name) const {
  auto it = predicates_.find(name);
  return it == predicates_.end() ? nullptr : &it->second;
}

namespace {

std::size_t term_size(const Term& t) {
  std::size_t n = 1;
  for (const auto& a : t.args) n += term_size(a);
  return n;
}

}  // namespace

std::optional<Term> Signature::ground_term(const std::string& sort) const {
  std::map<std::string, Term> best;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& s : sorts_) {
      for (const auto& c : s.constructors) {
        std::vector<Term> args;
        bool ok = true;
        for (const auto& a : c.arg_sorts) {
          auto it = best.find(a);
          if (it == best.end()) {
            ok = false;
            break;
          }
          args.push_back(it->second);
        }
        if (!ok) continue;
        Term candidate = Term::ctor(c.name, s.name, std::move(args));
        auto it = best.find(s.name);
        if (it == best.end() || term_size(candidate) < term_size(it->second)) {
          best[s.name] = std::move(candidate);
          changed = true;
        }
      }
    }
  }
  auto it = best.find(sort);
  if (it == best.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Free variables and metavariables

namespace {

using Env = std::vector<std::string>;

bool bound_in(const Env& env, const std::string& name) {
  return std::find(env.begin(), env.end(), name) != env.end();
}

void collect_rigids(const Term& t, const Env& env, std::set<std::string>& out) {
  if (t.kind == TermKind::Rigid) {
    if (!bound_in(env, t.name)) out.insert(t.name);
    return;
  }
  for (const auto& a : t.args) collect_rigids(a, env, out);
}

void collect_rigids(const Formula& f, Env& env, std::set<std::string>& out) {
  for (const auto& t : f.args) collect_rigids(t, env, out);
  if (f.is_binder()) {
    env.push_back(f.name);
    collect_rigids(f.body(), env, out);
    env.pop_back();
    return;
  }
  for (const auto& p : f.parts) collect_rigids(p, env, out);
}

void collect_metas(const Term& t, std::set<int>& out) {
  if (t.kind == TermKind::Meta) out.insert(t.meta);
  for (const auto& a : t.args) collect_metas(a, out);
}

void collect_metas(const Formula& f, std::set<int>& term_metas, std::set<int>* prop_metas) {
  for (const auto& t : f.args) collect_metas(t, term_metas);
  if (f.kind == Connective::PropMeta && prop_metas) prop_metas->insert(f.meta);
  for (const auto& p : f.parts) collect_metas(p, term_metas, prop_metas);
}

bool term_mentions(const Term& t, const Substitution& s) {
  if (t.kind == TermKind::Meta) return s.meta(t.meta) != nullptr;
  if (t.kind == TermKind::Schematic) return s.schematic(t.name) != nullptr;
  return std::any_of(t.args.begin(), t.args.end(), [&](const Term& a) { return term_mentions(a, s); });
}

bool mentions(const Formula& f, const Substitution& s) {
  if (f.kind == Connective::PropMeta) return s.prop_meta(f.meta) != nullptr;
  if (f.kind == Connective::PropParam) return s.prop(f.name) != nullptr;
  for (const auto& t : f.args)
    if (term_mentions(t, s)) return true;
  return std::any_of(f.parts.begin(), f.parts.end(), [&](const Formula& p) { return mentions(p, s); });
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string name = base + "′";
  while (avoid.count(name)) name += "′";
  return name;
}

}  // namespace

std::set<std::string> free_rigids(const Term& t) {
  std::set<std::string> out;
  collect_rigids(t, Env{}, out);
  return out;
}

std::set<std::string> free_rigids(const Formula& f) {
  std::set<std::string> out;
  Env env;
  collect_rigids(f, env, out);
  return out;
}

bool occurs_free(const Term& t, const std::string& name) { return free_rigids(t).count(name) > 0; }
bool occurs_free(const Formula& f, const std::string& name) { return free_rigids(f).count(name) > 0; }

std::set<int> metas_of(const Term& t) {
  std::set<int> out;
  collect_metas(t, out);
  return out;
}

std::set<int> metas_of(const Formula& f) {
  std::set<int> out;
  collect_metas(f, out, nullptr);
  return out;
}

bool has_metas(const Term& t) {
  if (t.kind == TermKind::Meta) return true;
  return std::any_of(t.args.begin(), t.args.end(), [](const Term& a) { return has_metas(a); });
}

bool has_metas(const Formula& f) {
  if (f.kind == Connective::PropMeta) return true;
  for (const auto& t : f.args)
    if (has_metas(t)) return true;
  return std::any_of(f.parts.begin(), f.parts.end(), [](const Formula& p) { return has_metas(p); });
}

namespace {

void collect_schematics(const Term& t, std::vector<Binder>& out) {
  if (t.kind == TermKind::Schematic) {
    Binder b{t.name, t.sort};
    if (std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
  }
  for (const auto& a : t.args) collect_schematics(a, out);
}

void collect_schematics(const Formula& f, std::vector<Binder>& out) {
  for (const auto& t : f.args) collect_schematics(t, out);
  for (const auto& p : f.parts) collect_schematics(p, out);
}

void collect_props(const Formula& f, std::vector<std::string>& out) {
  if (f.kind == Connective::PropParam && std::find(out.begin(), out.end(), f.name) == out.end())
    out.push_back(f.name);
  for (const auto& p : f.parts) collect_props(p, out);
}

}  // namespace

std::vector<Binder> schematics_of(const Formula& f) {
  std::vector<Binder> out;
  collect_schematics(f, out);
  return out;
}

// ---------------------------------------------------------------------------
// Substitution

bool Substitution::empty() const {
  return metas_.empty() && schematics_.empty() && prop_metas_.empty() && props_.empty();
}

const Term* Substitution::meta(int id) const {
  auto it = metas_.find(id);
  return it == metas_.end() ? nullptr : &it->second;
}

const Term* Substitution::schematic(const std::string& name) const {
  auto it = schematics_.find(name);
  return it == schematics_.end() ? nullptr : &it->second;
}

const Formula* Substitution::prop_meta(int id) const {
  auto it = prop_metas_.find(id);
  return it == prop_metas_.end() ? nullptr : &it->second;
}

const Formula* Substitution::prop(const std::string& name) const {
  auto it = props_.find(name);
  return it == props_.end() ? nullptr : &it->second;
}

void Substitution::bind_meta(int id, Term value) {
  value = substitute(value, *this);
  Substitution single;
  single.metas_.emplace(id, value);
  for (auto& [_, t] : metas_) t = substitute(t, single);
  for (auto& [_, t] : schematics_) t = substitute(t, single);
  for (auto& [_, f] : prop_metas_) f = substitute(f, single);
  for (auto& [_, f] : props_) f = substitute(f, single);
  metas_[id] = std::move(value);
}

void Substitution::bind_prop_meta(int id, Formula value) {
  value = substitute(value, *this);
  Substitution single;
  single.prop_metas_.emplace(id, value);
  for (auto& [_, f] : prop_metas_) f = substitute(f, single);
  for (auto& [_, f] : props_) f = substitute(f, single);
  prop_metas_[id] = std::move(value);
}

void Substitution::bind_schematic(std::string name, Term value) { schematics_[std::move(name)] = std::move(value); }

void Substitution::bind_prop(std::string name, Formula value) { props_[std::move(name)] = std::move(value); }

std::set<std::string> Substitution::range_rigids() const {
  std::set<std::string> out;
  for (const auto& [_, t] : metas_) collect_rigids(t, Env{}, out);
  for (const auto& [_, t] : schematics_) collect_rigids(t, Env{}, out);
  for (const auto& [_, f] : prop_metas_) {
    auto r = free_rigids(f);
    out.insert(r.begin(), r.end());
  }
  for (const auto& [_, f] : props_) {
    auto r = free_rigids(f);
    out.insert(r.begin(), r.end());
  }
  return out;
}

Term fresh_meta(MetaSupply& supply, const std::string& sort) { return Term::metavar(supply.next(), sort); }

Term substitute(const Term& t, const Substitution& s) {
  switch (t.kind) {
    case TermKind::Meta:
      if (const Term* v = s.meta(t.meta)) return *v;
      return t;
    case TermKind::Schematic:
      if (const Term* v = s.schematic(t.name)) return *v;
      return t;
    case TermKind::Rigid:
      return t;
    case TermKind::Ctor:
      break;
  }
  Term out = t;
  for (auto& a : out.args) a = substitute(a, s);
  return out;
}

namespace {

Formula substitute_in(const Formula& f, const Substitution& s, const std::set<std::string>& danger) {
  switch (f.kind) {
    case Connective::PropMeta:
      if (const Formula* v = s.prop_meta(f.meta)) return *v;
      return f;
    case Connective::PropParam:
      if (const Formula* v = s.prop(f.name)) return *v;
      return f;
    case Connective::Forall:
    case Connective::Exists: {
      if (!mentions(f.body(), s)) return f;
      if (danger.count(f.name)) {
        std::set<std::string> avoid = danger;
        auto body_free = free_rigids(f.body());
        avoid.insert(body_free.begin(), body_free.end());
        std::string renamed = fresh_name(f.name, avoid);
        Formula body = replace_free(f.body(), f.name, Term::rigid(renamed, f.sort));
        Formula out = f;
        out.name = renamed;
        out.parts[0] = substitute_in(body, s, danger);
        return out;
      }
      Formula out = f;
      out.parts[0] = substitute_in(f.body(), s, danger);
      return out;
    }
    default:
      break;
  }
  Formula out = f;
  for (auto& t : out.args) t = substitute(t, s);
  for (auto& p : out.parts) p = substitute_in(p, s, danger);
  return out;
}

}  // namespace

Formula substitute(const Formula& f, const Substitution& s) {
  if (s.empty()) return f;
  return substitute_in(f, s, s.range_rigids());
}

Term replace_free(const Term& t, const std::string& name, const Term& value) {
  if (t.kind == TermKind::Rigid) return t.name == name ? value : t;
  if (t.args.empty()) return t;
  Term out = t;
  for (auto& a : out.args) a = replace_free(a, name, value);
  return out;
}

Formula replace_free(const Formula& f, const std::string& name, const Term& value) {
  if (f.is_binder()) {
    if (f.name == name || !occurs_free(f.body(), name)) return f;
    auto value_free = free_rigids(value);
    Formula out = f;
    if (value_free.count(f.name)) {
      std::set<std::string> avoid = value_free;
      auto body_free = free_rigids(f.body());
      avoid.insert(body_free.begin(), body_free.end());
      avoid.insert(name);
      out.name = fresh_name(f.name, avoid);
      out.parts[0] = replace_free(f.body(), f.name, Term::rigid(out.name, f.sort));
    }
    out.parts[0] = replace_free(out.parts[0], name, value);
    return out;
  }
  Formula out = f;
  for (auto& t : out.args) t = replace_free(t, name, value);
  for (auto& p : out.parts) p = replace_free(p, name, value);
  return out;
}

Formula instantiate(const Formula& binder, const Term& value) {
  return replace_free(binder.body(), binder.name, value);
}

// ---------------------------------------------------------------------------
// Alpha-equivalence

namespace {

// Distance to the innermost binder of `name`, or -1 when free.
int binder_index(const Env& env, const std::string& name) {
  for (std::size_t i = env.size(); i-- > 0;)
    if (env[i] == name) return static_cast<int>(env.size() - 1 - i);
  return -1;
}

bool alpha_terms(const Term& a, const Env& ea, const Term& b, const Env& eb) {
  if (a.kind != b.kind || a.sort != b.sort) return false;
  switch (a.kind) {
    case TermKind::Rigid: {
      int ia = binder_index(ea, a.name);
      int ib = binder_index(eb, b.name);
      if (ia != ib) return false;
      return ia >= 0 || a.name == b.name;
    }
    case TermKind::Schematic:
      return a.name == b.name;
    case TermKind::Meta:
      return a.meta == b.meta;
    case TermKind::Ctor:
      break;
  }
  if (a.name != b.name || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!alpha_terms(a.args[i], ea, b.args[i], eb)) return false;
  return true;
}

bool alpha_formulas(const Formula& a, Env& ea, const Formula& b, Env& eb) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Connective::Pred:
      if (a.name != b.name || a.args.size() != b.args.size()) return false;
      for (std::size_t i = 0; i < a.args.size(); ++i)
        if (!alpha_terms(a.args[i], ea, b.args[i], eb)) return false;
      return true;
    case Connective::PropParam:
      return a.name == b.name;
    case Connective::PropMeta:
      return a.meta == b.meta;
    case Connective::Bottom:
      return true;
    case Connective::Forall:
    case Connective::Exists: {
      if (a.sort != b.sort) return false;
      ea.push_back(a.name);
      eb.push_back(b.name);
      bool ok = alpha_formulas(a.body(), ea, b.body(), eb);
      ea.pop_back();
      eb.pop_back();
      return ok;
    }
    default:
      break;
  }
  if (a.parts.size() != b.parts.size()) return false;
  for (std::size_t i = 0; i < a.parts.size(); ++i)
    if (!alpha_formulas(a.parts[i], ea, b.parts[i], eb)) return false;
  return true;
}

}  // namespace

bool alpha_equal(const Formula& a, const Formula& b) {
  Env ea, eb;
  return alpha_formulas(a, ea, b, eb);
}

// ---------------------------------------------------------------------------
// Freshening

Substitution freshening(const std::vector<Binder>& schematics, const std::vector<std::string>& props,
                        MetaSupply& supply) {
  Substitution s;
  for (const auto& b : schematics) s.bind_schematic(b.name, fresh_meta(supply, b.sort));
  for (const auto& p : props) s.bind_prop(p, Formula::prop_meta(supply.next()));
  return s;
}

std::pair<Formula, Substitution> freshen_schematics(const Formula& f, MetaSupply& supply) {
  std::vector<std::string> props;
  collect_props(f, props);
  Substitution mapping = freshening(schematics_of(f), props, supply);
  return {substitute(f, mapping), mapping};
}

// ---------------------------------------------------------------------------
// Unification

std::string_view to_string(UnifyError e) {
  switch (e) {
    case UnifyError::Clash:
      return "Clash";
    case UnifyError::OccursCheck:
      return "OccursCheck";
    case UnifyError::SortMismatch:
      return "SortMismatch";
  }
  return "?";
}

std::string to_string(const Term& t);
std::string to_string(const Formula& f);

namespace {

class Unifier {
 public:
  explicit Unifier(Substitution s) : subst_(std::move(s)) {}

  bool terms(const Term& a, const Env& ea, const Term& b, const Env& eb) {
    static const Env kFree;
    if (a.kind == TermKind::Meta) {
      if (const Term* v = subst_.meta(a.meta)) {
        Term resolved = *v;
        return terms(resolved, kFree, b, eb);
      }
    }
    if (b.kind == TermKind::Meta) {
      if (const Term* v = subst_.meta(b.meta)) {
        Term resolved = *v;
        return terms(a, ea, resolved, kFree);
      }
    }
    if (a.kind == TermKind::Meta && b.kind == TermKind::Meta) {
      if (a.meta == b.meta) return true;
      // The younger metavariable is bound to the older one.
      return a.meta > b.meta ? bind(a, b, eb) : bind(b, a, ea);
    }
    if (a.kind == TermKind::Meta) return bind(a, b, eb);
    if (b.kind == TermKind::Meta) return bind(b, a, ea);
    if (a.sort != b.sort) return fail(UnifyError::SortMismatch, a, b);
    if (a.kind != b.kind) return fail(UnifyError::Clash, a, b);
    switch (a.kind) {
      case TermKind::Rigid: {
        int ia = binder_index(ea, a.name);
        int ib = binder_index(eb, b.name);
        if (ia != ib || (ia < 0 && a.name != b.name)) return fail(UnifyError::Clash, a, b);
        return true;
      }
      case TermKind::Schematic:
        return a.name == b.name || fail(UnifyError::Clash, a, b);
      default:
        break;
    }
    if (a.name != b.name || a.args.size() != b.args.size()) return fail(UnifyError::Clash, a, b);
    for (std::size_t i = 0; i < a.args.size(); ++i)
      if (!terms(a.args[i], ea, b.args[i], eb)) return false;
    return true;
  }

  bool formulas(const Formula& a, Env& ea, const Formula& b, Env& eb) {
    if (a.kind == Connective::PropMeta) {
      if (const Formula* v = subst_.prop_meta(a.meta)) {
        Formula resolved = *v;
        Env free;
        return formulas(resolved, free, b, eb);
      }
    }
    if (b.kind == Connective::PropMeta) {
      if (const Formula* v = subst_.prop_meta(b.meta)) {
        Formula resolved = *v;
        Env free;
        return formulas(a, ea, resolved, free);
      }
    }
    if (a.kind == Connective::PropMeta && b.kind == Connective::PropMeta) {
      if (a.meta == b.meta) return true;
      return a.meta > b.meta ? bind_prop(a, b, eb) : bind_prop(b, a, ea);
    }
    if (a.kind == Connective::PropMeta) return bind_prop(a, b, eb);
    if (b.kind == Connective::PropMeta) return bind_prop(b, a, ea);
    if (a.kind != b.kind) return fail(UnifyError::Clash, a, b);
    switch (a.kind) {
      case Connective::Pred:
        if (a.name != b.name || a.args.size() != b.args.size()) return fail(UnifyError::Clash, a, b);
        for (std::size_t i = 0; i < a.args.size(); ++i)
          if (!terms(a.args[i], ea, b.args[i], eb)) return false;
        return true;
      case Connective::PropParam:
        return a.name == b.name || fail(UnifyError::Clash, a, b);
      case Connective::Bottom:
        return true;
      case Connective::Forall:
      case Connective::Exists: {
        if (a.sort != b.sort) return fail(UnifyError::SortMismatch, a, b);
        ea.push_back(a.name);
        eb.push_back(b.name);
        bool ok = formulas(a.body(), ea, b.body(), eb);
        ea.pop_back();
        eb.pop_back();
        return ok;
      }
      default:
        break;
    }
    for (std::size_t i = 0; i < a.parts.size(); ++i)
      if (!formulas(a.parts[i], ea, b.parts[i], eb)) return false;
    return true;
  }

  Substitution take() { return std::move(subst_); }
  const UnifyFailure& failure() const { return failure_; }

 private:
  static bool escapes(const Term& t, const Env& env) {
    if (t.kind == TermKind::Rigid) return bound_in(env, t.name);
    return std::any_of(t.args.begin(), t.args.end(), [&](const Term& a) { return escapes(a, env); });
  }

  bool bind(const Term& var, const Term& value, const Env& value_env) {
    if (var.sort != value.sort) return fail(UnifyError::SortMismatch, var, value);
    if (escapes(value, value_env)) return fail(UnifyError::Clash, var, value);
    Term resolved = substitute(value, subst_);
    if (metas_of(resolved).count(var.meta)) return fail(UnifyError::OccursCheck, var, resolved);
    subst_.bind_meta(var.meta, std::move(resolved));
    return true;
  }

  bool bind_prop(const Formula& var, const Formula& value, const Env& value_env) {
    for (const auto& name : free_rigids(value))
      if (bound_in(value_env, name)) return fail(UnifyError::Clash, var, value);
    Formula resolved = substitute(value, subst_);
    std::set<int> term_metas, prop_metas;
    collect_metas(resolved, term_metas, &prop_metas);
    if (prop_metas.count(var.meta)) return fail(UnifyError::OccursCheck, var, resolved);
    subst_.bind_prop_meta(var.meta, std::move(resolved));
    return true;
  }

  template <typename T>
  bool fail(UnifyError e, const T& a, const T& b) {
    failure_.error = e;
    failure_.detail = to_string(a) + " vs " + to_string(b);
    return false;
  }

  Substitution subst_;
  UnifyFailure failure_;
};

}  // namespace

UnifyResult unify(const Term& a, const Term& b, const Substitution& under) {
  Unifier u(under);
  UnifyResult r;
  if (u.terms(a, Env{}, b, Env{}))
    r.unifier = u.take();
  else
    r.failure = u.failure();
  return r;
}

UnifyResult unify(const Formula& a, const Formula& b, const Substitution& under) {
  Unifier u(under);
  Env ea, eb;
  UnifyResult r;
  if (u.formulas(a, ea, b, eb))
    r.unifier = u.take();
  else
    r.failure = u.failure();
  return r;
}

}  // namespace fitchmi
