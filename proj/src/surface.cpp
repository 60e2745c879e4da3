#include <algorithm>
#include <map>
#include <set>

#include "fitchmi/surface.hpp"
#include "utf8.hpp"

namespace fitchmi {

namespace {

struct BuiltinSpelling {
  BuiltinRule rule;
  std::string_view unicode;
};

constexpr BuiltinSpelling kSpellings[] = {
    {BuiltinRule::AndIntro, "∧-intro"},    {BuiltinRule::AndElim, "∧-elim"},
    {BuiltinRule::OrIntro, "∨-intro"},     {BuiltinRule::OrElim, "∨-elim"},
    {BuiltinRule::ImpIntro, "⟹-intro"},   {BuiltinRule::ImpElim, "⟹-elim"},
    {BuiltinRule::NotIntro, "¬-intro"},    {BuiltinRule::NotElim, "¬-elim"},
    {BuiltinRule::BotElim, "⊥-elim"},      {BuiltinRule::ForallIntro, "∀-intro"},
    {BuiltinRule::ForallElim, "∀-elim"},   {BuiltinRule::ExistsIntro, "∃-intro"},
    {BuiltinRule::ExistsElim, "∃-elim"},
};

const std::map<std::string_view, std::string_view>& connective_aliases() {
  static const std::map<std::string_view, std::string_view> m = {
      {"∧", "∧"},       {"/\\", "∧"},    {"and", "∧"},     {"∨", "∨"},      {"\\/", "∨"},
      {"or", "∨"},      {"⟹", "⟹"},    {"==>", "⟹"},   {"⇒", "⟹"},    {"implies", "⟹"},
      {"imp", "⟹"},    {"¬", "¬"},      {"not", "¬"},     {"~", "¬"},      {"⊥", "⊥"},
      {"bottom", "⊥"},  {"∀", "∀"},      {"forall", "∀"},  {"∃", "∃"},      {"exists", "∃"},
  };
  return m;
}

}  // namespace

std::string_view builtin_name(BuiltinRule r) {
  for (const auto& s : kSpellings)
    if (s.rule == r) return s.unicode;
  return "?";
}

std::optional<BuiltinRule> builtin_from_name(std::string_view name) {
  auto dash = name.rfind('-');
  if (dash == std::string_view::npos) return std::nullopt;
  auto it = connective_aliases().find(name.substr(0, dash));
  if (it == connective_aliases().end()) return std::nullopt;
  std::string canonical = std::string(it->second) + std::string(name.substr(dash));
  for (const auto& s : kSpellings)
    if (s.unicode == canonical) return s.rule;
  return std::nullopt;
}

const std::string& Step::label() const { return is_line() ? line().label : subproof().label; }

SourcePos Step::pos() const { return is_line() ? line().pos : subproof().pos; }

bool operator==(const Case& a, const Case& b) {
  return a.name == b.name && a.by_rule == b.by_rule && a.vars == b.vars && a.hypotheses == b.hypotheses &&
         a.body == b.body;
}

bool operator==(const Justification& a, const Justification& b) {
  if (a.kind != b.kind) return false;
  if (a.kind == JustKind::BuiltIn && a.builtin != b.builtin) return false;
  return a.name == b.name && a.refs == b.refs && a.scrutinee == b.scrutinee && a.fact == b.fact &&
         a.cases == b.cases;
}

bool operator==(const Line& a, const Line& b) {
  return a.label == b.label && a.formula == b.formula && a.just == b.just;
}

bool operator==(const Subproof& a, const Subproof& b) {
  return a.label == b.label && a.assumptions == b.assumptions && a.body == b.body;
}

bool operator==(const Step& a, const Step& b) { return a.node == b.node; }

Formula TheoremDecl::target() const {
  Formula f = conclusion;
  for (auto it = premises.rbegin(); it != premises.rend(); ++it) f = Formula::implies(*it, std::move(f));
  return f;
}

const TheoremDecl* ModuleAST::find_theorem(std::string_view name) const {
  for (const auto& d : decls)
    if (const auto* t = std::get_if<TheoremDecl>(&d); t && t->name == name) return t;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

constexpr std::string_view kDashes = "----------------------------";

std::string rtrim(std::string s) {
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

std::string groups(const std::vector<Binder>& vars) {
  std::string out;
  for (std::size_t i = 0; i < vars.size();) {
    std::size_t j = i;
    while (j < vars.size() && vars[j].sort == vars[i].sort) ++j;
    if (!out.empty()) out += ' ';
    out += '(';
    for (std::size_t k = i; k < j; ++k) out += (k > i ? ", " : "") + vars[k].name;
    out += " : " + vars[i].sort + ")";
    i = j;
  }
  return out;
}

std::string labelled(const std::string& label) { return label.empty() ? "" : label + ": "; }

std::string assumption_text(const Assumption& a) {
  switch (a.kind) {
    case AssumptionKind::ForAny:
      return "for any " + groups(a.vars);
    case AssumptionKind::ForSome:
      return labelled(a.label) + to_string(a.formula) + " for some " + groups(a.vars);
    case AssumptionKind::Hypothesis:
      break;
  }
  return labelled(a.label) + to_string(a.formula);
}

std::string refs_text(const std::vector<Ref>& refs) {
  if (refs.empty()) return "";
  std::string out = " on ";
  for (std::size_t i = 0; i < refs.size(); ++i) out += (i ? ", " : "") + refs[i].label;
  return out;
}

std::string case_pattern(const Case& c) {
  if (c.by_rule) return "rule " + c.name + (c.vars.empty() ? "" : " " + groups(c.vars));
  std::string out = c.name;
  if (!c.vars.empty()) {
    out += '(';
    for (std::size_t i = 0; i < c.vars.size(); ++i) out += (i ? ", " : "") + c.vars[i].name;
    out += ')';
  }
  return out;
}

void print_block(const Block& block, const std::string& prefix, std::vector<std::string>& out);

void print_cases(const std::vector<Case>& cases, const std::string& prefix, std::vector<std::string>& out) {
  std::string inner = prefix + "| ";
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const Case& c = cases[i];
    if (i) out.push_back(rtrim(prefix));
    out.push_back(prefix + "case " + case_pattern(c) + " ->");
    for (const auto& h : c.hypotheses) out.push_back(inner + labelled(h.label) + to_string(h.formula));
    if (c.hypotheses.empty()) out.push_back(prefix + "|");
    out.push_back(prefix + "|" + std::string(kDashes));
    print_block(c.body, inner, out);
  }
}

void print_line(const Line& l, const std::string& prefix, std::vector<std::string>& out) {
  std::string head = prefix + labelled(l.label);
  const Justification& j = l.just;
  switch (j.kind) {
    case JustKind::Prove:
      out.push_back(head + "prove " + to_string(l.formula));
      return;
    case JustKind::BuiltIn:
      out.push_back(head + to_string(l.formula) + " by rule " + std::string(builtin_name(j.builtin)) +
                    refs_text(j.refs));
      return;
    case JustKind::Rule:
      out.push_back(head + to_string(l.formula) + " by rule " + j.name + refs_text(j.refs));
      return;
    case JustKind::Theorem:
      out.push_back(head + to_string(l.formula) + " by theorem " + j.name + refs_text(j.refs));
      return;
    case JustKind::Induction:
      out.push_back(head + to_string(l.formula) + " by induction :");
      break;
    case JustKind::CaseAnalysis: {
      std::string on = j.fact ? j.fact->label : (j.scrutinee ? to_string(*j.scrutinee) : "?");
      out.push_back(head + to_string(l.formula) + " by case analysis on " + on + " :");
      break;
    }
  }
  print_cases(j.cases, prefix, out);
}

void print_subproof(const Subproof& s, const std::string& prefix, std::vector<std::string>& out) {
  std::string lbl = labelled(s.label);
  std::string pad(utf8::length(lbl), ' ');
  std::string child = prefix + pad + "| ";
  for (std::size_t i = 0; i < s.assumptions.size(); ++i) {
    std::string text = assumption_text(s.assumptions[i]);
    out.push_back(i == 0 ? prefix + lbl + "| " + text : child + text);
  }
  out.push_back(prefix + pad + "|" + std::string(kDashes));
  print_block(s.body, child, out);
}

void print_block(const Block& block, const std::string& prefix, std::vector<std::string>& out) {
  for (const auto& step : block) {
    if (step.is_line())
      print_line(step.line(), prefix, out);
    else
      print_subproof(step.subproof(), prefix, out);
  }
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::string sequent(const std::vector<Formula>& premises, const Formula& conclusion, bool turnstile) {
  std::string out;
  for (std::size_t i = 0; i < premises.size(); ++i) out += (i ? ", " : "") + to_string(premises[i]);
  if (turnstile || !premises.empty()) out += premises.empty() ? "⊢ " : " ⊢ ";
  return out + to_string(conclusion);
}

}  // namespace

std::string pretty_print(const Formula& f) { return to_string(f); }

std::string pretty_print(const Block& block, const std::string& prefix) {
  std::vector<std::string> lines;
  print_block(block, prefix, lines);
  return join_lines(lines);
}

std::string pretty_print(const Decl& decl) {
  if (const auto* d = std::get_if<DataDecl>(&decl)) {
    std::string out = "data " + d->name + " =";
    for (std::size_t i = 0; i < d->constructors.size(); ++i) {
      const auto& c = d->constructors[i];
      out += (i ? " | " : " ") + c.name;
      if (!c.arg_sorts.empty()) {
        out += '(';
        for (std::size_t k = 0; k < c.arg_sorts.size(); ++k) out += (k ? ", " : "") + c.arg_sorts[k];
        out += ')';
      }
    }
    return out + "\n";
  }
  if (const auto* r = std::get_if<RuleDecl>(&decl)) {
    std::string out = "rule " + r->name;
    if (!r->params.empty()) out += " for all " + groups(r->params);
    return out + " : " + sequent(r->premises, r->conclusion, true) + "\n";
  }
  const auto& t = std::get<TheoremDecl>(decl);
  std::string out = "theorem " + std::string(t.schema ? "schema " : "") + t.name;
  if (!t.prop_params.empty()) {
    out += " for all propositions ";
    for (std::size_t i = 0; i < t.prop_params.size(); ++i) out += (i ? ", " : "") + t.prop_params[i];
  }
  if (!t.params.empty()) out += " for all " + groups(t.params);
  out += " : " + sequent(t.premises, t.conclusion, t.turnstile) + "\n";
  return out + pretty_print(t.proof);
}

std::string pretty_print(const ModuleAST& module) {
  std::string out;
  for (std::size_t i = 0; i < module.decls.size(); ++i) {
    if (i) out += "\n";
    out += pretty_print(module.decls[i]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Label normalisation

namespace {

class LabelNormalizer {
 public:
  Block run(const Block& b) {
    Block tagged = tag_block(b);
    std::map<std::string, std::string> names;
    int next = 0;
    for (const auto& id : order_)
      if (used_.count(id)) names[id] = "L" + std::to_string(++next);
    rename_block(tagged, names);
    return tagged;
  }

 private:
  using Scope = std::map<std::string, std::string>;

  std::string define(const std::string& label) {
    if (label.empty()) return label;
    std::string id = "\x01" + std::to_string(order_.size());
    order_.push_back(id);
    scopes_.back()[label] = id;
    return id;
  }

  void resolve(Ref& r) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(r.label);
      if (f != it->end()) {
        r.label = f->second;
        used_.insert(r.label);
        return;
      }
    }
  }

  Block tag_block(const Block& b) {
    Block out;
    for (const auto& step : b) {
      if (step.is_line()) {
        Line l = step.line();
        for (auto& r : l.just.refs) resolve(r);
        if (l.just.fact) resolve(*l.just.fact);
        for (auto& c : l.just.cases) {
          scopes_.emplace_back();
          for (auto& h : c.hypotheses) h.label = define(h.label);
          c.body = tag_block(c.body);
          scopes_.pop_back();
        }
        l.label = define(l.label);
        out.push_back(Step{std::move(l)});
      } else {
        Subproof s = step.subproof();
        scopes_.emplace_back();
        for (auto& a : s.assumptions) a.label = define(a.label);
        s.body = tag_block(s.body);
        scopes_.pop_back();
        s.label = define(s.label);
        out.push_back(Step{std::move(s)});
      }
    }
    return out;
  }

  static void rename(std::string& label, const std::map<std::string, std::string>& names) {
    if (label.empty() || label[0] != '\x01') return;
    auto it = names.find(label);
    label = it == names.end() ? "" : it->second;
  }

  static void rename_block(Block& b, const std::map<std::string, std::string>& names) {
    for (auto& step : b) {
      if (step.is_line()) {
        Line& l = step.line();
        rename(l.label, names);
        for (auto& r : l.just.refs) rename(r.label, names);
        if (l.just.fact) rename(l.just.fact->label, names);
        for (auto& c : l.just.cases) {
          for (auto& h : c.hypotheses) rename(h.label, names);
          rename_block(c.body, names);
        }
      } else {
        Subproof& s = step.subproof();
        rename(s.label, names);
        for (auto& a : s.assumptions) rename(a.label, names);
        rename_block(s.body, names);
      }
    }
  }

  std::vector<Scope> scopes_{Scope{}};
  std::vector<std::string> order_;
  std::set<std::string> used_;
};

}  // namespace

Block normalize_labels(const Block& block) { return LabelNormalizer().run(block); }

}  // namespace fitchmi
