#pragma once

// Standard model of the Peano fixture: ℕ as integers, Sum(a, b, c) as a + b = c.
// Quantifiers range over 0..bound.

#include <map>
#include <stdexcept>
#include <string>

#include "fitchmi/kernel.hpp"

namespace fitchmi::testing {

using Valuation = std::map<std::string, int>;

inline int eval_term(const Term& t, const Valuation& v) {
  switch (t.kind) {
    case TermKind::Rigid:
    case TermKind::Schematic:
      return v.at(t.name);
    case TermKind::Ctor:
      if (t.name == "Zero") return 0;
      if (t.name == "S") return eval_term(t.args.at(0), v) + 1;
      break;
    case TermKind::Meta:
      break;
  }
  throw std::logic_error("cannot evaluate term");
}

inline bool holds(const Formula& f, Valuation v, int bound = 6) {
  switch (f.kind) {
    case Connective::Pred:
      if (f.name == "Sum") return eval_term(f.args[0], v) + eval_term(f.args[1], v) == eval_term(f.args[2], v);
      throw std::logic_error("unknown predicate " + f.name);
    case Connective::And: return holds(f.lhs(), v, bound) && holds(f.rhs(), v, bound);
    case Connective::Or: return holds(f.lhs(), v, bound) || holds(f.rhs(), v, bound);
    case Connective::Implies: return !holds(f.lhs(), v, bound) || holds(f.rhs(), v, bound);
    case Connective::Not: return !holds(f.lhs(), v, bound);
    case Connective::Bottom: return false;
    case Connective::Forall:
    case Connective::Exists: {
      bool all = true, any = false;
      // witnesses may exceed the universal range
      int top = f.kind == Connective::Exists ? 3 * bound : bound;
      for (int i = 0; i <= top; ++i) {
        v[f.name] = i;
        bool b = holds(f.body(), v, bound);
        all = all && b;
        any = any || b;
      }
      return f.kind == Connective::Forall ? all : any;
    }
    default:
      throw std::logic_error("cannot evaluate formula");
  }
}

}  // namespace fitchmi::testing
