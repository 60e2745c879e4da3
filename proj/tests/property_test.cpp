#include <gtest/gtest.h>

#include "fitchmi/search.hpp"
#include "support/criteria.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace fitchmi;
using namespace fitchmi::testing;

// Smaller runs with other seeds than the acceptance binary.

TEST(KernelProperties, OtherSeeds) {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    Verdict v = kernel_properties(2000, seed);
    EXPECT_TRUE(v.passed) << v.detail;
  }
}

TEST(SearchProperties, OtherSeeds) {
  for (std::uint64_t seed : {21u, 22u}) {
    Verdict v = search_is_sound(300, seed);
    EXPECT_TRUE(v.passed) << v.detail;
  }
}

TEST(RoundTripProperties, OtherSeeds) {
  Verdict v = round_trips(300, 31);
  EXPECT_TRUE(v.passed) << v.detail;
}

// Search is complete on these databases: whatever the oracle derives within
// its bound, search proves.
TEST(SearchProperties, DerivableGoalsAreProved) {
  Rng rng(41);
  int checked = 0;
  for (int d = 0; d < 60; ++d) {
    RuleDb db = random_rule_db(rng);
    Library lib = db.library();
    SearchEnv env;
    env.signature = &db.sig;
    env.library = lib;
    ForwardChainer fc(lib.rules, {}, {});
    for (int g = 0; g < 5; ++g) {
      Formula goal = random_ground_literal(rng, db, 3);
      if (!fc.derives(goal)) continue;
      ++checked;
      EXPECT_EQ(search(goal, env).kind, SearchOutcome::Kind::Proved) << to_string(goal) << "\n" << db.text();
    }
  }
  EXPECT_GT(checked, 0);
}

TEST(Oracles, ReferenceUnifierBasics) {
  Term x = Term::metavar(0, "ℕ");
  Term zero = Term::ctor("Zero", "ℕ");
  auto s = mm_unify({{Term::ctor("S", "ℕ", {x}), Term::ctor("S", "ℕ", {zero})}});
  ASSERT_TRUE(s);
  EXPECT_EQ(s->at(0), zero);
  EXPECT_FALSE(mm_unify({{x, Term::ctor("S", "ℕ", {x})}}));
  EXPECT_FALSE(mm_unify({{Term::rigid("a", "ℕ"), zero}}));
}

TEST(Oracles, ForwardChainingOnPeano) {
  Signature sig = kernel_signature();
  Schema zero{"sum-zero", {{"n", "ℕ"}}, {}, {}, Formula::pred("R", {Term::ctor("Zero", "ℕ"), Term::schematic("n", "ℕ")})};
  Schema succ{"sum-s",
              {{"n", "ℕ"}, {"m", "ℕ"}},
              {},
              {Formula::pred("R", {Term::schematic("n", "ℕ"), Term::schematic("m", "ℕ")})},
              Formula::pred("R", {Term::ctor("S", "ℕ", {Term::schematic("n", "ℕ")}), Term::schematic("m", "ℕ")})};
  ForwardChainer fc({zero, succ}, {}, {});
  auto num = [](int k) {
    Term t = Term::ctor("Zero", "ℕ");
    while (k-- > 0) t = Term::ctor("S", "ℕ", {t});
    return t;
  };
  EXPECT_TRUE(fc.derives(Formula::pred("R", {num(5), num(2)})));
  EXPECT_FALSE(fc.derives(Formula::pred("R", {num(7), num(2)})));  // needs 8 rounds
  EXPECT_TRUE(fc.exhaustive());
}

TEST(Oracles, DeBruijnIgnoresBinderNames) {
  Formula a = Formula::forall("x", "ℕ", Formula::pred("P", {Term::rigid("x", "ℕ")}));
  Formula b = Formula::forall("y", "ℕ", Formula::pred("P", {Term::rigid("y", "ℕ")}));
  Formula c = Formula::forall("y", "ℕ", Formula::pred("P", {Term::rigid("x", "ℕ")}));
  EXPECT_EQ(de_bruijn(a), de_bruijn(b));
  EXPECT_NE(de_bruijn(a), de_bruijn(c));
}
