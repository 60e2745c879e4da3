#include <gtest/gtest.h>

#include "fitchmi/kernel.hpp"

using namespace fitchmi;

namespace {

const std::string N = "ℕ";

Term zero() { return Term::ctor("Zero", N); }
Term s(Term t) { return Term::ctor("S", N, {std::move(t)}); }
Term rigid(const std::string& x) { return Term::rigid(x, N); }
Term meta(int id) { return Term::metavar(id, N); }
Formula sum(Term a, Term b, Term c) { return Formula::pred("Sum", {std::move(a), std::move(b), std::move(c)}); }

Signature peano() {
  Signature sig;
  sig.add_sort(Sort{N, {{"Zero", {}}, {"S", {N}}}});
  return sig;
}

}  // namespace

TEST(Substitute, ReplacesMetas) {
  Substitution sub;
  sub.bind_meta(0, s(zero()));
  EXPECT_EQ(substitute(sum(meta(0), zero(), meta(0)), sub), sum(s(zero()), zero(), s(zero())));
}

TEST(Substitute, EmptyIsIdentity) {
  Formula f = Formula::prop("P");
  EXPECT_EQ(substitute(f, Substitution{}), f);
}

TEST(Substitute, AvoidsCapture) {
  // ∀n:Sum(n,m,n) with m ↦ n renames the binder.
  Formula f = Formula::forall("n", N, sum(rigid("n"), Term::schematic("m", N), rigid("n")));
  Substitution sub;
  sub.bind_schematic("m", rigid("n"));
  Formula out = substitute(f, sub);
  EXPECT_EQ(out, Formula::forall("n′", N, sum(rigid("n′"), rigid("n"), rigid("n′"))));
  EXPECT_EQ(to_string(out), "∀ (n′ : ℕ) : Sum(n′, n, n′)");
}

TEST(ReplaceFree, RespectsShadowing) {
  Formula f = Formula::conj(sum(rigid("x"), zero(), zero()), Formula::forall("x", N, sum(rigid("x"), zero(), zero())));
  Formula out = replace_free(f, "x", s(zero()));
  EXPECT_EQ(out.lhs(), sum(s(zero()), zero(), zero()));
  EXPECT_EQ(out.rhs(), f.rhs());
}

TEST(ReplaceFree, RenamesCapturingBinder) {
  Formula f = Formula::forall("y", N, sum(rigid("x"), rigid("y"), zero()));
  Formula out = replace_free(f, "x", rigid("y"));
  EXPECT_TRUE(alpha_equal(out, Formula::forall("z", N, sum(rigid("y"), rigid("z"), zero()))));
}

TEST(AlphaEqual, Examples) {
  Formula a = Formula::forall("n", N, sum(rigid("n"), zero(), rigid("n")));
  Formula b = Formula::forall("k", N, sum(rigid("k"), zero(), rigid("k")));
  Formula c = Formula::forall("n", N, sum(zero(), rigid("n"), rigid("n")));
  EXPECT_TRUE(alpha_equal(a, b));
  EXPECT_FALSE(alpha_equal(a, c));
  Formula d = sum(rigid("m₁"), zero(), rigid("m₁"));
  EXPECT_TRUE(alpha_equal(d, d));
}

TEST(AlphaEqual, FreeVersusBound) {
  // ∀x:Sum(x,y,y) is not ∀y:Sum(y,y,y).
  Formula a = Formula::forall("x", N, sum(rigid("x"), rigid("y"), rigid("y")));
  Formula b = Formula::forall("y", N, sum(rigid("y"), rigid("y"), rigid("y")));
  EXPECT_FALSE(alpha_equal(a, b));
}

TEST(Unify, SharedMetaPropagates) {
  auto r = unify(sum(zero(), meta(0), meta(0)), sum(zero(), s(zero()), meta(1)));
  ASSERT_TRUE(r);
  EXPECT_EQ(*r.unifier->meta(0), s(zero()));
  EXPECT_EQ(*r.unifier->meta(1), s(zero()));
}

TEST(Unify, Identity) {
  auto r = unify(meta(0), meta(0));
  ASSERT_TRUE(r);
  EXPECT_TRUE(r.unifier->empty());
}

TEST(Unify, OccursCheck) {
  auto r = unify(meta(0), s(meta(0)));
  ASSERT_FALSE(r);
  EXPECT_EQ(r.failure.error, UnifyError::OccursCheck);
}

TEST(Unify, RigidClash) {
  auto r = unify(sum(s(rigid("m₁")), meta(0), meta(1)), sum(zero(), meta(2), meta(2)));
  ASSERT_FALSE(r);
  EXPECT_EQ(r.failure.error, UnifyError::Clash);
}

TEST(Unify, RigidsUnifyOnlyWithThemselves) {
  EXPECT_TRUE(unify(rigid("a"), rigid("a")));
  EXPECT_FALSE(unify(rigid("a"), rigid("b")));
  EXPECT_FALSE(unify(rigid("a"), zero()));
}

TEST(Unify, SortMismatch) {
  auto r = unify(Term::metavar(0, "Bool"), zero());
  ASSERT_FALSE(r);
  EXPECT_EQ(r.failure.error, UnifyError::SortMismatch);
}

TEST(Unify, YoungerMetaBindsToOlder) {
  auto r = unify(meta(3), meta(7));
  ASSERT_TRUE(r);
  EXPECT_EQ(r.unifier->meta(3), nullptr);
  EXPECT_EQ(*r.unifier->meta(7), meta(3));
}

TEST(Unify, UnderBinders) {
  Formula a = Formula::forall("x", N, sum(rigid("x"), meta(0), zero()));
  Formula b = Formula::forall("y", N, sum(rigid("y"), s(zero()), zero()));
  auto r = unify(a, b);
  ASSERT_TRUE(r);
  EXPECT_EQ(*r.unifier->meta(0), s(zero()));
}

TEST(Unify, BoundVariableCannotEscape) {
  Formula a = Formula::forall("x", N, sum(meta(0), zero(), zero()));
  Formula b = Formula::forall("y", N, sum(rigid("y"), zero(), zero()));
  EXPECT_FALSE(unify(a, b));
}

TEST(Unify, ExtendsUnder) {
  Substitution under;
  under.bind_meta(0, zero());
  EXPECT_FALSE(unify(meta(0), s(meta(1)), under));
  auto r = unify(meta(1), meta(0), under);
  ASSERT_TRUE(r);
  EXPECT_EQ(*r.unifier->meta(1), zero());
}

TEST(Unify, PropositionMetas) {
  Formula a = Formula::implies(Formula::prop_meta(0), Formula::prop_meta(1));
  Formula b = Formula::implies(sum(zero(), zero(), zero()), Formula::bottom());
  auto r = unify(a, b);
  ASSERT_TRUE(r);
  EXPECT_EQ(substitute(a, *r.unifier), b);
}

TEST(Substitution, StaysIdempotent) {
  Substitution sub;
  sub.bind_meta(1, s(meta(0)));
  sub.bind_meta(0, zero());
  EXPECT_EQ(*sub.meta(1), s(zero()));
  Formula f = sum(meta(0), meta(1), meta(2));
  EXPECT_EQ(substitute(substitute(f, sub), sub), substitute(f, sub));
}

TEST(Fresh, MetasAreDistinct) {
  MetaSupply supply;
  Term a = fresh_meta(supply, N);
  Term b = fresh_meta(supply, N);
  EXPECT_NE(a.meta, b.meta);
}

TEST(Fresh, FreshenSchematics) {
  MetaSupply supply;
  Formula f = sum(Term::schematic("n₁", N), Term::schematic("n₂", N), Term::schematic("n₃", N));
  auto [out, mapping] = freshen_schematics(f, supply);
  auto metas = metas_of(out);
  EXPECT_EQ(metas.size(), 3u);
  EXPECT_EQ(mapping.schematics().size(), 3u);

  auto [same, none] = freshen_schematics(sum(zero(), zero(), zero()), supply);
  EXPECT_EQ(same, sum(zero(), zero(), zero()));
  EXPECT_TRUE(none.empty());
}

TEST(Signature, GroundTermAndErrors) {
  Signature sig = peano();
  EXPECT_EQ(*sig.ground_term(N), zero());
  EXPECT_THROW(sig.add_sort(Sort{"B", {{"Zero", {}}}}), SignatureError);
  EXPECT_THROW(sig.add_sort(Sort{"C", {{"Mk", {"Missing"}}}}), SignatureError);
  Signature empty_sort;
  empty_sort.add_sort(Sort{"Loop", {{"L", {"Loop"}}}});
  EXPECT_FALSE(empty_sort.ground_term("Loop"));
}

TEST(Print, Precedence) {
  Formula p = Formula::prop("P"), q = Formula::prop("Q"), r = Formula::prop("R");
  EXPECT_EQ(to_string(Formula::implies(Formula::implies(p, q), r)), "(P ⟹ Q) ⟹ R");
  EXPECT_EQ(to_string(Formula::implies(p, Formula::implies(q, r))), "P ⟹ Q ⟹ R");
  EXPECT_EQ(to_string(Formula::conj(p, Formula::disj(q, r))), "P ∧ (Q ∨ R)");
  EXPECT_EQ(to_string(Formula::conj(Formula::forall("x", N, p), q)), "(∀ (x : ℕ) : P) ∧ Q");
  EXPECT_EQ(to_string(Formula::negate(Formula::conj(p, q))), "¬(P ∧ Q)");
  EXPECT_EQ(to_string(Formula::implies(p, Formula::exists("x", N, q))), "P ⟹ ∃ (x : ℕ) : Q");
}
