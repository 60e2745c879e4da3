#include "fitchmi/kernel.hpp"

namespace fitchmi {

namespace {

enum class Slot { Top, ImpLeft, ImpRight, OrLeft, OrRight, AndLeft, AndRight, NotArg };

bool needs_parens(Connective k, Slot slot) {
  switch (k) {
    case Connective::Forall:
    case Connective::Exists:
      return slot != Slot::Top && slot != Slot::ImpRight;
    case Connective::Implies:
      return slot != Slot::Top && slot != Slot::ImpRight;
    case Connective::Or:
      return slot == Slot::AndLeft || slot == Slot::AndRight || slot == Slot::NotArg || slot == Slot::OrRight;
    case Connective::And:
      return slot == Slot::AndRight || slot == Slot::NotArg;
    default:
      return false;
  }
}

void print_term(const Term& t, std::string& out) {
  switch (t.kind) {
    case TermKind::Meta:
      out += "?" + std::to_string(t.meta);
      return;
    case TermKind::Rigid:
    case TermKind::Schematic:
      out += t.name;
      return;
    case TermKind::Ctor:
      break;
  }
  out += t.name;
  if (t.args.empty()) return;
  out += '(';
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i) out += ", ";
    print_term(t.args[i], out);
  }
  out += ')';
}

void print_formula(const Formula& f, Slot slot, std::string& out) {
  bool parens = needs_parens(f.kind, slot);
  if (parens) out += '(';
  switch (f.kind) {
    case Connective::Pred:
      out += f.name;
      if (!f.args.empty()) {
        out += '(';
        for (std::size_t i = 0; i < f.args.size(); ++i) {
          if (i) out += ", ";
          print_term(f.args[i], out);
        }
        out += ')';
      }
      break;
    case Connective::PropParam:
      out += f.name;
      break;
    case Connective::PropMeta:
      out += "?P" + std::to_string(f.meta);
      break;
    case Connective::Bottom:
      out += "⊥";
      break;
    case Connective::Not:
      out += "¬";
      print_formula(f.body(), Slot::NotArg, out);
      break;
    case Connective::And:
      print_formula(f.lhs(), Slot::AndLeft, out);
      out += " ∧ ";
      print_formula(f.rhs(), Slot::AndRight, out);
      break;
    case Connective::Or:
      print_formula(f.lhs(), Slot::OrLeft, out);
      out += " ∨ ";
      print_formula(f.rhs(), Slot::OrRight, out);
      break;
    case Connective::Implies:
      print_formula(f.lhs(), Slot::ImpLeft, out);
      out += " ⟹ ";
      print_formula(f.rhs(), Slot::ImpRight, out);
      break;
    case Connective::Forall:
    case Connective::Exists:
      out += f.kind == Connective::Forall ? "∀ (" : "∃ (";
      out += f.name + " : " + f.sort + ") : ";
      print_formula(f.body(), Slot::Top, out);
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string to_string(const Term& t) {
  std::string out;
  print_term(t, out);
  return out;
}

std::string to_string(const Formula& f) {
  std::string out;
  print_formula(f, Slot::Top, out);
  return out;
}

}  // namespace fitchmi
