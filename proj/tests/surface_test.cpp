#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "fitchmi/surface.hpp"

using namespace fitchmi;

namespace {

std::string slurp(const std::string& rel) {
  std::ifstream in(std::string(FITCHMI_SOURCE_DIR) + "/" + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const TheoremDecl& theorem(const ModuleAST& m, const std::string& name) {
  const TheoremDecl* t = m.find_theorem(name);
  if (!t) throw std::runtime_error("no theorem " + name);
  return *t;
}

int parse_error_line(const std::string& text) {
  try {
    parse_module(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Parse, ModusPonens) {
  ModuleAST m = parse_module(slurp("fixtures/modus_ponens.proof"));
  const TheoremDecl& t = theorem(m, "modus-ponens");
  EXPECT_TRUE(t.schema);
  EXPECT_EQ(t.prop_params, (std::vector<std::string>{"P", "K"}));
  ASSERT_EQ(t.premises.size(), 2u);
  EXPECT_EQ(to_string(t.premises[0]), "P ⟹ K");
  EXPECT_EQ(to_string(t.conclusion), "K");
  ASSERT_EQ(t.proof.size(), 1u);
  const Subproof& sp = t.proof[0].subproof();
  EXPECT_EQ(sp.label, "proof");
  ASSERT_EQ(sp.assumptions.size(), 2u);
  EXPECT_EQ(sp.assumptions[0].label, "p→k");
  ASSERT_EQ(sp.body.size(), 1u);
  const Line& l = sp.body[0].line();
  EXPECT_EQ(l.just.kind, JustKind::BuiltIn);
  EXPECT_EQ(l.just.builtin, BuiltinRule::ImpElim);
  ASSERT_EQ(l.just.refs.size(), 2u);
  EXPECT_EQ(l.just.refs[0].label, "p→k");
}

TEST(Parse, PeanoModuleShape) {
  ModuleAST m = parse_module(slurp("fixtures/peano.proof"));
  int data = 0, rules = 0, theorems = 0;
  for (const auto& d : m.decls) {
    data += std::holds_alternative<DataDecl>(d);
    rules += std::holds_alternative<RuleDecl>(d);
    theorems += std::holds_alternative<TheoremDecl>(d);
  }
  EXPECT_EQ(data, 1);
  EXPECT_EQ(rules, 2);
  EXPECT_EQ(theorems, 3);
  const TheoremDecl& t = theorem(m, "sum-total-comm");
  EXPECT_EQ(to_string(t.conclusion),
            "∀ (n₁ : ℕ) : ∀ (n₂ : ℕ) : ∃ (n₃ : ℕ) : Sum(n₁, n₂, n₃) ∧ Sum(n₂, n₁, n₃)");
  ASSERT_EQ(t.proof.size(), 1u);
  const Line& top = t.proof[0].line();
  EXPECT_EQ(top.just.kind, JustKind::Induction);
  ASSERT_EQ(top.just.cases.size(), 2u);
  const Case& succ = top.just.cases[1];
  EXPECT_EQ(succ.name, "S");
  EXPECT_EQ(succ.vars[0].name, "m₁");
  ASSERT_EQ(succ.hypotheses.size(), 1u);
  EXPECT_EQ(succ.hypotheses[0].label, "ind-hyp");
  ASSERT_EQ(succ.body.size(), 2u);
  const Subproof& one = succ.body[0].subproof();
  EXPECT_EQ(one.assumptions[0].kind, AssumptionKind::ForAny);
  const Line& split = one.body[0].line();
  EXPECT_EQ(split.just.kind, JustKind::CaseAnalysis);
  ASSERT_TRUE(split.just.scrutinee);
  EXPECT_EQ(split.just.scrutinee->name, "N₂");
  const Case& ss = split.just.cases[1];
  ASSERT_EQ(ss.body.size(), 3u);
  const Subproof& four = ss.body[1].subproof();
  EXPECT_EQ(four.label, "4");
  EXPECT_EQ(four.assumptions[0].kind, AssumptionKind::ForSome);
  EXPECT_EQ(four.assumptions[0].vars[0].name, "N₃");
  EXPECT_EQ(four.body.size(), 8u);
}

TEST(Parse, SubproofSeparatorRequired) {
  std::string text =
      "theorem t for all propositions P : P ⟹ P\n"
      "a: | h: P\n"
      "| P by rule ∧-elim on h\n";
  EXPECT_EQ(parse_error_line(text), 3);
}

TEST(Parse, BadIndentationNamesLine) {
  std::string text =
      "data ℕ = Zero | S(ℕ)\n"
      "theorem t : ∀ (n : ℕ) : ⊥\n"
      "∀ (n : ℕ) : ⊥ by induction :\n"
      "case Zero ->\n"
      "|\n"
      "|---\n"
      "| | | ⊥ by rule ⊥-elim on x\n";
  EXPECT_EQ(parse_error_line(text), 7);
}

TEST(Parse, EmptyModule) {
  EXPECT_TRUE(parse_module("").decls.empty());
  EXPECT_TRUE(parse_module("  # nothing\n\n").decls.empty());
  EXPECT_EQ(pretty_print(parse_module("")), "");
}

TEST(Parse, DuplicateAndUnknownNames) {
  try {
    parse_module("data ℕ = Zero | S(ℕ)\ndata B = Zero\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseErrorKind::DuplicateName);
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 10);
  }
  try {
    parse_module("data ℕ = Zero | S(ℕ)\nrule r : ⊢ Sum(Zero, q)\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.kind(), ParseErrorKind::UnknownIdentifier);
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 22);
  }
}

TEST(Parse, PredicateArityFixedByFirstUse) {
  EXPECT_THROW(parse_module("data ℕ = Zero\nrule a : ⊢ P(Zero)\nrule b : ⊢ P(Zero, Zero)\n"), ParseError);
}

TEST(Parse, AsciiAliases) {
  ModuleAST m = parse_module(
      "data Nat = Zero | S(Nat)\n"
      "rule r for all (n1, n2 : Nat) : Sum(n1, n2, n2) |- Sum(S(n1), n2, n2)\n"
      "theorem t : forall (x : Nat) : exists (y : Nat) : not Sum(x, y, y) \\/ Sum(y, x, x) /\\ bottom ==> Sum(x, x, x)\n"
      "prove forall (x : Nat) : exists (y : Nat) : not Sum(x, y, y) \\/ Sum(y, x, x) /\\ bottom ==> Sum(x, x, x)\n");
  const auto& r = std::get<RuleDecl>(m.decls[1]);
  EXPECT_EQ(r.params[0].name, "n₁");
  EXPECT_EQ(r.params[0].sort, "ℕ");
  EXPECT_EQ(to_string(std::get<TheoremDecl>(m.decls[2]).conclusion),
            "∀ (x : ℕ) : ∃ (y : ℕ) : ¬Sum(x, y, y) ∨ Sum(y, x, x) ∧ ⊥ ⟹ Sum(x, x, x)");
}

TEST(Parse, ClosedSubproofLabelRejected) {
  std::string text =
      "theorem t for all propositions P : P ⟹ P ⟹ P\n"
      "a: | h: P\n"
      "   |---\n"
      "   | inner: P ∧ P by rule ∧-intro on h, h\n"
      "   | P by rule ∧-elim on inner\n"
      "b: | g: P\n"
      "   |---\n"
      "   | P by rule ∧-elim on inner\n";
  try {
    parse_module(text);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 8);
    EXPECT_EQ(e.column(), 26);
  }
}

TEST(Fragment, SectionTwoFourBlock) {
  ModuleAST m = parse_module(slurp("fixtures/peano.proof"));
  FragmentScope scope;
  scope.eigenvariables = {{"m₁", "ℕ"}, {"m₂", "ℕ"}};
  scope.labels = {"ind-hyp₁", "ind-hyp₂"};
  Block b = parse_fragment(slurp("fixtures/s2_4_fragment.txt"), m.signature, scope);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(b[0].line().just.refs[0].label, "ind-hyp₁");
  EXPECT_EQ(b[1].subproof().body.size(), 8u);
  EXPECT_EQ(b[1].subproof().assumptions[0].kind, AssumptionKind::ForSome);
}

TEST(Fragment, SingleLine) {
  FragmentScope scope;
  scope.propositions = {"P", "K"};
  scope.labels = {"p→k", "p"};
  Block b = parse_fragment("K by rule ⟹-elim on p→k, p", Signature{}, scope);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].line().formula, Formula::prop("K"));
}

TEST(Fragment, UnlabelledSubproof) {
  FragmentScope scope;
  scope.propositions = {"P"};
  Block b = parse_fragment(
      "| h: P\n"
      "|---\n"
      "| P by rule ∧-elim on x\n"
      "P ⟹ P by rule ⟹-intro on s\n",
      Signature{}, scope);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_FALSE(b[0].is_line());
  EXPECT_EQ(b[0].subproof().assumptions[0].label, "h");
}

TEST(Print, FormulaCanonical) {
  Signature sig;
  sig.add_sort(Sort{"ℕ", {{"Zero", {}}, {"S", {"ℕ"}}}});
  Formula f = parse_formula("∀ (n : ℕ) : Sum(n, Zero, n)", sig);
  EXPECT_EQ(pretty_print(f), "∀ (n : ℕ) : Sum(n, Zero, n)");
}

TEST(RoundTrip, FixtureModules) {
  for (const char* file : {"fixtures/peano.proof", "fixtures/modus_ponens.proof"}) {
    ModuleAST m = parse_module(slurp(file));
    std::string printed = pretty_print(m);
    ModuleAST again = parse_module(printed);
    EXPECT_EQ(m, again) << printed;
    EXPECT_EQ(printed, pretty_print(again));
  }
}

TEST(Normalize, IgnoresLabelNames) {
  ModuleAST m = parse_module(slurp("fixtures/peano.proof"));
  std::string text = slurp("fixtures/peano.proof");
  auto replace_all = [](std::string s, const std::string& from, const std::string& to) {
    for (std::size_t p = s.find(from); p != std::string::npos; p = s.find(from, p + to.size()))
      s.replace(p, from.size(), to);
    return s;
  };
  text = replace_all(text, "ind-hyp", "IH");
  text = replace_all(text, " p:", " q:");
  text = replace_all(text, "on p", "on q");
  ModuleAST renamed = parse_module(text);
  const auto& a = theorem(m, "sum-total-comm").proof;
  const auto& b = theorem(renamed, "sum-total-comm").proof;
  EXPECT_NE(a, b);
  EXPECT_EQ(normalize_labels(a), normalize_labels(b));
}

TEST(Builtins, NamesRoundTrip) {
  for (BuiltinRule r : kAllBuiltins) EXPECT_EQ(builtin_from_name(builtin_name(r)), r);
  EXPECT_EQ(builtin_from_name("forall-elim"), BuiltinRule::ForallElim);
  EXPECT_EQ(builtin_from_name("==>-intro"), BuiltinRule::ImpIntro);
  EXPECT_EQ(builtin_from_name("sum-s"), std::nullopt);
}
