#include <gtest/gtest.h>

#include <functional>

#include "fitchmi/checker.hpp"
#include "fitchmi/search.hpp"
#include "support/fixtures.hpp"
#include "support/peano_model.hpp"

using namespace fitchmi;
using namespace fitchmi::testing;

namespace {

struct Peano {
  ModuleAST module = load_module("fixtures/peano.proof");
  SearchEnv env(const std::string& before, std::vector<Binder> eigen = {}) const {
    SearchEnv e;
    e.signature = &module.signature;
    e.library = library_before(module, before);
    e.eigenvariables = std::move(eigen);
    return e;
  }
  Formula f(const std::string& text, const std::vector<Binder>& eigen = {}) const {
    return parse_formula(text, module.signature, eigen);
  }
};

const std::vector<Binder> kM1{{"m₁", "ℕ"}};
const std::vector<Binder> kM1M2{{"m₁", "ℕ"}, {"m₂", "ℕ"}};

void walk(const DerivationPtr& d, const std::function<void(const Derivation&)>& f) {
  if (!d) return;
  f(*d);
  for (auto& p : d->premises) walk(p, f);
}

std::string shape(const DerivationPtr& d) {
  std::string out;
  walk(d, [&](const Derivation& n) { out += std::string(to_string(n.kind)) + " " + n.name + " " + to_string(n.conclusion) + "\n"; });
  return out;
}

// Closed terms over Zero, S and the given variables, up to `depth` applications of S.
std::vector<Term> candidates(const std::vector<Binder>& vars, int depth) {
  std::vector<Term> out{Term::ctor("Zero", "ℕ")};
  for (auto& b : vars) out.push_back(Term::rigid(b.name, b.sort));
  std::vector<Term> layer = out;
  for (int i = 0; i < depth; ++i) {
    std::vector<Term> next;
    for (auto& t : layer) next.push_back(Term::ctor("S", "ℕ", {t}));
    out.insert(out.end(), next.begin(), next.end());
    layer = next;
  }
  return out;
}

bool valid_for_all(const Formula& f, const std::vector<Binder>& vars, Valuation v = {}, std::size_t i = 0) {
  if (i == vars.size()) return holds(f, v);
  for (int k = 0; k <= 5; ++k) {
    v[vars[i].name] = k;
    if (!valid_for_all(f, vars, v, i + 1)) return false;
  }
  return true;
}

}  // namespace

TEST(Search, ProvesTheZeroCase) {
  Peano p;
  SearchEnv env = p.env("sum-total-comm");
  Formula goal = p.f("∀ (n₂ : ℕ) : ∃ (n₃ : ℕ) : Sum(Zero, n₂, n₃) ∧ Sum(n₂, Zero, n₃)");
  SearchOutcome out = search(goal, env);
  ASSERT_EQ(out.kind, SearchOutcome::Kind::Proved);
  EXPECT_TRUE(alpha_equal(out.derivation->conclusion, goal));
  EXPECT_EQ(validate(out.derivation, p.module.signature, env.library), std::nullopt);
}

TEST(Search, FindsTheSuccessorWitness) {
  Peano p;
  SearchEnv env = p.env("sum-total-comm", kM1);
  Formula goal = p.f("∃ (n₃ : ℕ) : Sum(S(m₁), Zero, n₃) ∧ Sum(Zero, S(m₁), n₃)", kM1);
  SearchOutcome out = search(goal, env);
  ASSERT_EQ(out.kind, SearchOutcome::Kind::Proved);
  ASSERT_EQ(out.derivation->builtin, BuiltinRule::ExistsIntro);
  ASSERT_TRUE(out.derivation->witness);
  Term w = *out.derivation->witness;
  EXPECT_EQ(w, Term::ctor("S", "ℕ", {Term::rigid("m₁", "ℕ")}));
  EXPECT_EQ(validate(out.derivation, p.module.signature, env.library, {}, kM1), std::nullopt);

  // Oracle: the only small witness that works in the standard model.
  std::vector<Term> good;
  for (const Term& t : candidates(kM1, 3))
    if (valid_for_all(instantiate(goal, t), kM1)) good.push_back(t);
  ASSERT_EQ(good.size(), 1u);
  EXPECT_EQ(good[0], w);
}

TEST(Search, BindsTheMissingSumToZero) {
  Peano p;
  SearchEnv env = p.env("sum-zero-rhs");
  SearchOutcome out = search(p.f("∃ (n : ℕ) : Sum(Zero, Zero, n)"), env);
  ASSERT_EQ(out.kind, SearchOutcome::Kind::Proved);
  ASSERT_TRUE(out.derivation->witness);
  EXPECT_EQ(*out.derivation->witness, Term::ctor("Zero", "ℕ"));
}

TEST(Search, SuccessorCaseIsStuckAtEveryDepth) {
  Peano p;
  SearchEnv env = p.env("sum-total-comm", kM1M2);
  Formula goal = p.f("∃ (n₃ : ℕ) : Sum(S(m₁), S(m₂), n₃) ∧ Sum(S(m₂), S(m₁), n₃)", kM1M2);
  for (int depth : {4, 8, 16, 32}) {
    SearchOptions o;
    o.max_depth = depth;
    SearchOutcome out = search(goal, env, o);
    EXPECT_EQ(out.kind, SearchOutcome::Kind::Stuck) << depth;
    EXPECT_FALSE(out.trace.empty());
  }
}

TEST(Search, StuckTraceEndsInFailure) {
  Peano p;
  SearchEnv env = p.env("sum-total-comm");
  SearchOutcome out = search(p.module.find_theorem("sum-total-comm")->target(), env);
  ASSERT_EQ(out.kind, SearchOutcome::Kind::Stuck);
  ASSERT_FALSE(out.trace.empty());
  EXPECT_TRUE(out.trace.back().kind == StepKind::Failed || out.trace.back().kind == StepKind::DepthLimit);
  EXPECT_EQ(out.trace.front().kind, StepKind::PickedInduction);
}

TEST(Search, IsDeterministic) {
  Peano p;
  SearchEnv env = p.env("sum-total-comm");
  SearchOptions o;
  o.allow_holes = true;
  Formula goal = p.module.find_theorem("sum-total-comm")->target();
  SearchOutcome a = search(goal, env, o), b = search(goal, env, o);
  ASSERT_EQ(a.holes.size(), b.holes.size());
  EXPECT_EQ(shape(a.derivation), shape(b.derivation));
  EXPECT_EQ(render_trace(a.holes[0].trace), render_trace(b.holes[0].trace));
  EXPECT_EQ(a.log.size(), b.log.size());
}

TEST(Search, OnlyLiteralFactsAreMatched) {
  Peano p;
  SearchEnv env = p.env("sum-zero-rhs", kM1);
  Formula lit = p.f("Sum(m₁, Zero, m₁)", kM1);
  Formula univ = p.f("∀ (n : ℕ) : Sum(n, Zero, n)");
  env.facts = {{"u", univ, make_hypothesis("u", univ)}, {"l", lit, make_hypothesis("l", lit)}};
  env.labels = {"u", "l"};
  SearchOutcome out = search(p.f("Sum(S(m₁), Zero, S(m₁))", kM1), env);
  ASSERT_EQ(out.kind, SearchOutcome::Kind::Proved);
  bool used_l = false;
  for (auto& s : out.log) {
    if (s.kind == StepKind::TriedEnvMatch) {
      EXPECT_NE(s.name, "u");
      used_l = used_l || s.name == "l";
    }
  }
  EXPECT_TRUE(used_l);
  walk(out.derivation, [](const Derivation& d) {
    if (d.kind == RuleKind::Hypothesis) EXPECT_EQ(d.name, "l");
  });
}

TEST(Search, PartialSearchMatchesTheGoldenPrompt) {
  Peano p;
  SearchEnv env = p.env("sum-total-comm");
  SearchOptions o;
  o.allow_holes = true;
  SearchOutcome out = search(p.module.find_theorem("sum-total-comm")->target(), env, o);
  ASSERT_EQ(out.kind, SearchOutcome::Kind::Partial);
  ASSERT_EQ(out.holes.size(), 1u);
  const Hole& h = out.holes[0];
  EXPECT_EQ(render_prompt("sum-total-comm", h.trace, h.goal), read_file("tests/golden/s2_4_prompt.txt"));
  ASSERT_EQ(h.hypotheses.size(), 2u);
  EXPECT_EQ(h.hypotheses[0].first, "ind-hyp₁");
  EXPECT_EQ(h.hypotheses[1].first, "ind-hyp₂");
  EXPECT_TRUE(has_gaps(out.derivation));
  EXPECT_EQ(validate(out.derivation, p.module.signature, env.library, {}, {}, {true}), std::nullopt);
}

TEST(Search, RootHoleWhenNothingApplies) {
  Peano p;
  SearchEnv env = p.env("sum-zero-rhs");
  SearchOptions o;
  o.allow_holes = true;
  Formula goal = p.f("Sum(Zero, Zero, S(Zero))");
  SearchOutcome out = search(goal, env, o);
  ASSERT_EQ(out.kind, SearchOutcome::Kind::Partial);
  ASSERT_EQ(out.holes.size(), 1u);
  EXPECT_TRUE(alpha_equal(out.holes[0].goal, goal));
}

TEST(RenderTrace, SingleInductionStep) {
  Peano p;
  TraceStep s;
  s.kind = StepKind::PickedInduction;
  s.goal = p.f("∀ (n : ℕ) : Sum(n, Zero, n)");
  s.var = "n";
  s.sort = "ℕ";
  EXPECT_EQ(render_trace({s}), "1)  goal: `∀ (n : ℕ) : Sum(n, Zero, n)'\n    strategy: induction\n");
}

TEST(Naming, FreshIndexed) {
  EXPECT_EQ(subscript(12), "₁₂");
  EXPECT_EQ(fresh_indexed("m", {}), "m₁");
  EXPECT_EQ(fresh_indexed("m", {"m₁", "m₃"}), "m₂");
}
