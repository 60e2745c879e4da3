#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

#include "fitchmi/session.hpp"

namespace fitchmi {

std::string prove_key(const Formula& goal, const std::vector<Binder>& eigenvariables) {
  std::string k = to_string(goal);
  for (const auto& b : eigenvariables) k += "|" + b.name;
  return k;
}

std::optional<ElaborationMode> elaboration_mode_from_name(std::string_view name) {
  if (name == "gapped") return ElaborationMode::Gapped;
  if (name == "full") return ElaborationMode::Full;
  return std::nullopt;
}

namespace {

void collect_labels(const Block& b, std::set<std::string>& out) {
  for (const auto& s : b) {
    if (!s.label().empty()) out.insert(s.label());
    if (s.is_line()) {
      for (const auto& c : s.line().just.cases) {
        for (const auto& h : c.hypotheses) out.insert(h.label);
        collect_labels(c.body, out);
      }
    } else {
      for (const auto& a : s.subproof().assumptions)
        if (!a.label.empty()) out.insert(a.label);
      collect_labels(s.subproof().body, out);
    }
  }
}

void collect_labels(const DerivationPtr& d, std::set<std::string>& out) {
  if (!d) return;
  if (d->kind == RuleKind::Hypothesis) out.insert(d->name);
  if (!d->cite.empty()) out.insert(d->cite);
  for (const auto& dis : d->discharges)
    for (const auto& h : dis.hypotheses) out.insert(h.first);
  for (const auto& p : d->premises) collect_labels(p, out);
}

bool cites(const DerivationPtr& d, const std::set<std::string>& labels) {
  if (!d) return false;
  if (d->kind == RuleKind::Hypothesis && labels.count(d->name)) return true;
  if (!d->cite.empty() && labels.count(d->cite)) return true;
  return std::any_of(d->premises.begin(), d->premises.end(), [&](const auto& p) { return cites(p, labels); });
}

void number_gaps(const DerivationPtr& d, std::map<const Derivation*, std::size_t>& out) {
  if (!d) return;
  if (d->kind == RuleKind::Gap) out.emplace(d.get(), out.size());
  for (const auto& p : d->premises) number_gaps(p, out);
}

Line make_line(std::string label, Formula f, Justification j) {
  Line l;
  l.label = std::move(label);
  l.formula = std::move(f);
  l.just = std::move(j);
  return l;
}

Justification builtin_just(BuiltinRule r, std::vector<std::string> refs) {
  Justification j;
  j.kind = JustKind::BuiltIn;
  j.builtin = r;
  for (auto& l : refs) j.refs.push_back(Ref{std::move(l), {}});
  return j;
}

class Elaborator {
 public:
  Elaborator(const std::vector<HoleFill>& fills, ElaborationMode mode, std::vector<Binder> eigen)
      : fills_(fills), mode_(mode), eigen_(std::move(eigen)) {}

  Block run(const DerivationPtr& root) {
    number_gaps(root, gaps_);
    collect_labels(root, reserved_);
    for (const auto& f : fills_) {
      if (f.fragment) collect_labels(*f.fragment, reserved_);
      collect_labels(f.derivation, reserved_);
    }
    Block out;
    std::string l = emit(root, out);
    finish(out, root->conclusion, l);
    return out;
  }

 private:
  const std::vector<HoleFill>& fills_;
  ElaborationMode mode_;
  std::vector<Binder> eigen_;
  std::set<std::string> reserved_;
  int next_label_ = 1;
  std::map<const Derivation*, std::size_t> gaps_;
  std::vector<LabelledFormula> anonymous_;  // hypotheses that had no label

  std::string fresh_label() {
    while (reserved_.count(std::to_string(next_label_))) ++next_label_;
    std::string l = std::to_string(next_label_++);
    reserved_.insert(l);
    return l;
  }

  std::string fresh_eigen(const std::string& base, const Formula& avoid) {
    std::set<std::string> taken = free_rigids(avoid);
    for (const auto& b : eigen_) taken.insert(b.name);
    std::string name = base;
    if (!name.empty() && std::islower(static_cast<unsigned char>(name[0])))
      name[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(name[0])));
    std::string candidate = name;
    for (int i = 1; taken.count(candidate); ++i) candidate = name + "′" + std::to_string(i);
    return candidate;
  }

  const HoleFill* fill_of(const Derivation* d) const {
    auto it = gaps_.find(d);
    if (it == gaps_.end() || it->second >= fills_.size()) return nullptr;
    return &fills_[it->second];
  }

  bool uses(const DerivationPtr& d, const std::set<std::string>& labels) const {
    if (!d) return false;
    if (d->kind == RuleKind::Gap) {
      const HoleFill* f = fill_of(d.get());
      return f && cites(f->derivation, labels);
    }
    if (d->kind == RuleKind::Hypothesis && labels.count(d->name)) return true;
    if (!d->cite.empty() && labels.count(d->cite)) return true;
    return std::any_of(d->premises.begin(), d->premises.end(), [&](const auto& p) { return uses(p, labels); });
  }

  bool holey(const DerivationPtr& d) const {
    if (!d) return false;
    if (d->kind == RuleKind::Gap) return true;
    return std::any_of(d->premises.begin(), d->premises.end(), [&](const auto& p) { return holey(p); });
  }

  std::string append(Block& out, Line l) {
    if (l.label.empty()) l.label = fresh_label();
    std::string label = l.label;
    out.push_back(Step{std::move(l)});
    return label;
  }

  // Makes the last step of `body` state `goal`, citing `label` if it does not.
  void finish(Block& body, const Formula& goal, const std::string& label) {
    if (!body.empty() && body.back().label() == label) return;
    std::string both = append(body, make_line("", Formula::conj(goal, goal), builtin_just(BuiltinRule::AndIntro, {label, label})));
    append(body, make_line("", goal, builtin_just(BuiltinRule::AndElim, {both})));
  }

  Block sub_block(const DerivationPtr& d, const std::vector<Binder>& vars, const std::vector<LabelledFormula>& anon = {}) {
    std::size_t ne = eigen_.size(), na = anonymous_.size();
    eigen_.insert(eigen_.end(), vars.begin(), vars.end());
    anonymous_.insert(anonymous_.end(), anon.begin(), anon.end());
    Block b;
    std::string l = emit(d, b);
    finish(b, d->conclusion, l);
    eigen_.resize(ne);
    anonymous_.resize(na);
    return b;
  }

  std::string prove_line(const DerivationPtr& d, Block& out) {
    Justification j;
    j.kind = JustKind::Prove;
    return append(out, make_line("", d->conclusion, j));
  }

  std::string emit(const DerivationPtr& d, Block& out) {
    if (!d) throw std::invalid_argument("empty derivation");
    if (!d->cite.empty()) return d->cite;
    if (d->kind == RuleKind::Gap) return gap(d, out);
    if (mode_ == ElaborationMode::Gapped && !holey(d) && d->kind != RuleKind::Hypothesis) return prove_line(d, out);
    switch (d->kind) {
      case RuleKind::Hypothesis:
        return hypothesis(*d);
      case RuleKind::UserRule:
      case RuleKind::Theorem: {
        Justification j;
        j.kind = d->kind == RuleKind::UserRule ? JustKind::Rule : JustKind::Theorem;
        j.name = d->name;
        for (const auto& p : d->premises) j.refs.push_back(Ref{emit(p, out), {}});
        return append(out, make_line("", d->conclusion, j));
      }
      case RuleKind::BuiltIn:
        return builtin(d, out);
      case RuleKind::Induction:
        return induction(d, out);
      case RuleKind::CaseAnalysis: {
        Justification j;
        j.kind = JustKind::CaseAnalysis;
        j.scrutinee = d->scrutinee;
        for (std::size_t i = 0; i < d->premises.size(); ++i) {
          const Discharge& dis = d->discharges.at(i);
          Case c;
          c.name = dis.ctor;
          c.vars = dis.eigenvars;
          c.body = sub_block(d->premises[i], dis.eigenvars);
          j.cases.push_back(std::move(c));
        }
        return append(out, make_line("", d->conclusion, j));
      }
      case RuleKind::Inversion: {
        Justification j;
        j.kind = JustKind::CaseAnalysis;
        j.fact = Ref{emit(d->premises.at(0), out), {}};
        for (std::size_t i = 1; i < d->premises.size(); ++i) {
          const Discharge& dis = d->discharges.at(i);
          Case c;
          c.name = dis.ctor;
          c.by_rule = true;
          c.vars = dis.eigenvars;
          for (const auto& [l, f] : dis.hypotheses) c.hypotheses.push_back(Hypothesis{l, f, {}});
          c.body = sub_block(d->premises[i], dis.eigenvars);
          j.cases.push_back(std::move(c));
        }
        return append(out, make_line("", d->conclusion, j));
      }
      case RuleKind::Gap:
        break;
    }
    return gap(d, out);
  }

  std::string hypothesis(const Derivation& d) {
    if (!d.name.empty()) return d.name;
    for (auto it = anonymous_.rbegin(); it != anonymous_.rend(); ++it)
      if (alpha_equal(it->second, d.conclusion)) return it->first;
    throw std::invalid_argument("unlabelled hypothesis " + to_string(d.conclusion));
  }

  // Labels a discharged hypothesis, inventing one when it had none.
  LabelledFormula hyp_label(const LabelledFormula& h, std::vector<LabelledFormula>& anon) {
    if (!h.first.empty()) return h;
    LabelledFormula named{fresh_label(), h.second};
    anon.push_back(named);
    return named;
  }

  std::string subproof(Block& out, std::vector<Assumption> as, Block body) {
    Subproof sp;
    sp.label = fresh_label();
    sp.assumptions = std::move(as);
    sp.body = std::move(body);
    std::string l = sp.label;
    out.push_back(Step{std::move(sp)});
    return l;
  }

  std::string hypothetical(const DerivationPtr& d, std::size_t i, Block& out) {
    const Discharge& dis = d->discharges.at(i);
    std::vector<LabelledFormula> anon;
    LabelledFormula h = hyp_label(dis.hypotheses.at(0), anon);
    Assumption a;
    a.kind = AssumptionKind::Hypothesis;
    a.label = h.first;
    a.formula = h.second;
    return subproof(out, {a}, sub_block(d->premises[i], {}, anon));
  }

  std::string builtin(const DerivationPtr& d, Block& out) {
    BuiltinRule r = d->builtin;
    std::vector<std::string> refs;
    switch (r) {
      case BuiltinRule::ImpIntro:
      case BuiltinRule::NotIntro:
        refs.push_back(hypothetical(d, 0, out));
        break;
      case BuiltinRule::OrElim:
        refs.push_back(emit(d->premises.at(0), out));
        refs.push_back(hypothetical(d, 1, out));
        refs.push_back(hypothetical(d, 2, out));
        break;
      case BuiltinRule::ForallIntro: {
        const Discharge& dis = d->discharges.at(0);
        Assumption a;
        a.kind = AssumptionKind::ForAny;
        a.vars = dis.eigenvars;
        refs.push_back(subproof(out, {a}, sub_block(d->premises.at(0), dis.eigenvars)));
        break;
      }
      case BuiltinRule::ExistsElim: {
        refs.push_back(emit(d->premises.at(0), out));
        const Discharge& dis = d->discharges.at(1);
        std::vector<LabelledFormula> anon;
        LabelledFormula h = hyp_label(dis.hypotheses.at(0), anon);
        Assumption a;
        a.kind = AssumptionKind::ForSome;
        a.vars = dis.eigenvars;
        a.label = h.first;
        a.formula = h.second;
        refs.push_back(subproof(out, {a}, sub_block(d->premises.at(1), dis.eigenvars, anon)));
        break;
      }
      default:
        for (const auto& p : d->premises) refs.push_back(emit(p, out));
    }
    return append(out, make_line("", d->conclusion, builtin_just(r, std::move(refs))));
  }

  std::string induction(const DerivationPtr& d, Block& out) {
    std::set<std::string> ihs;
    for (const auto& dis : d->discharges)
      for (const auto& h : dis.hypotheses) ihs.insert(h.first);
    bool used = std::any_of(d->premises.begin(), d->premises.end(), [&](const auto& p) { return uses(p, ihs); });
    const Formula& c = d->conclusion;

    if (mode_ == ElaborationMode::Gapped && !used) {
      // plain case split under a fresh eigenvariable, closed by ∀-intro
      Binder x{fresh_eigen(c.name, c), c.sort};
      Formula inner = instantiate(c, Term::rigid(x.name, x.sort));
      eigen_.push_back(x);
      Justification j;
      j.kind = JustKind::CaseAnalysis;
      j.scrutinee = Term::rigid(x.name, x.sort);
      for (std::size_t i = 0; i < d->premises.size(); ++i) {
        const Discharge& dis = d->discharges.at(i);
        Case cs;
        cs.name = dis.ctor;
        cs.vars = dis.eigenvars;
        cs.body = sub_block(d->premises[i], dis.eigenvars);
        j.cases.push_back(std::move(cs));
      }
      Block body;
      append(body, make_line("", inner, j));
      eigen_.pop_back();
      Assumption a;
      a.kind = AssumptionKind::ForAny;
      a.vars = {x};
      std::string sp = subproof(out, {a}, std::move(body));
      return append(out, make_line("", c, builtin_just(BuiltinRule::ForallIntro, {sp})));
    }

    Justification j;
    j.kind = JustKind::Induction;
    for (std::size_t i = 0; i < d->premises.size(); ++i) {
      const Discharge& dis = d->discharges.at(i);
      Case cs;
      cs.name = dis.ctor;
      cs.vars = dis.eigenvars;
      for (const auto& [l, f] : dis.hypotheses) cs.hypotheses.push_back(Hypothesis{l, f, {}});
      cs.body = sub_block(d->premises[i], dis.eigenvars);
      j.cases.push_back(std::move(cs));
    }
    return append(out, make_line("", c, j));
  }

  std::string gap(const DerivationPtr& d, Block& out) {
    const HoleFill* f = fill_of(d.get());
    if (!f || f->skipped || !f->fragment) return prove_line(d, out);
    Block frag = *f->fragment;
    if (mode_ == ElaborationMode::Full && f->proved) expand_proves(frag, *f->proved);
    for (auto& s : frag) out.push_back(std::move(s));
    if (out.back().label().empty()) {
      std::string l = fresh_label();
      if (out.back().is_line())
        out.back().line().label = l;
      else
        out.back().subproof().label = l;
    }
    return out.back().label();
  }

  // Replaces `prove` lines of a fragment by the steps search took.
  void expand_proves(Block& b, const std::map<std::string, DerivationPtr>& proved) {
    Block result;
    for (auto& s : b) {
      if (s.is_line()) {
        Line& l = s.line();
        if (l.just.kind == JustKind::Prove) {
          auto it = proved.find(prove_key(l.formula, eigen_));
          if (it != proved.end()) {
            Block steps;
            std::string r = emit(it->second, steps);
            finish(steps, l.formula, r);
            if (!l.label.empty()) steps.back().line().label = l.label;
            for (auto& st : steps) result.push_back(std::move(st));
            continue;
          }
        }
        for (auto& c : l.just.cases) {
          std::size_t ne = eigen_.size();
          eigen_.insert(eigen_.end(), c.vars.begin(), c.vars.end());
          expand_proves(c.body, proved);
          eigen_.resize(ne);
        }
      } else {
        std::size_t ne = eigen_.size();
        for (const auto& a : s.subproof().assumptions) eigen_.insert(eigen_.end(), a.vars.begin(), a.vars.end());
        expand_proves(s.subproof().body, proved);
        eigen_.resize(ne);
      }
      result.push_back(std::move(s));
    }
    b = std::move(result);
  }
};

}  // namespace

Block elaborate_derivation(const DerivationPtr& skeleton, const std::vector<HoleFill>& fills, ElaborationMode mode,
                           const std::vector<Binder>& eigenvariables) {
  return Elaborator(fills, mode, eigenvariables).run(skeleton);
}

ModuleAST replace_proof(const ModuleAST& module, const std::string& theorem, const Block& proof) {
  ModuleAST out;
  out.signature = module.signature;
  for (const auto& d : module.decls) {
    if (const auto* t = std::get_if<TheoremDecl>(&d); t && t->name == theorem) {
      TheoremDecl copy = *t;
      copy.proof = proof;
      out.decls.push_back(copy);
      return out;
    }
    out.decls.push_back(d);
  }
  throw std::invalid_argument("no theorem named " + theorem);
}

}  // namespace fitchmi
