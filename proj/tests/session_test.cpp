#include <gtest/gtest.h>

#include "fitchmi/session.hpp"
#include "support/fixtures.hpp"

using namespace fitchmi;
using namespace fitchmi::testing;

namespace {

SessionOptions fixed() {
  SessionOptions o;
  o.clock = fixed_clock();
  return o;
}

std::string fragment() { return read_file("fixtures/s2_4_fragment.txt"); }

std::string drop_line(const std::string& text, const std::string& prefix) {
  std::string out, line;
  std::istringstream in(text);
  while (std::getline(in, line)) {
    std::string trimmed = line.substr(std::min(line.find_first_not_of(" |"), line.size()));
    if (trimmed.rfind(prefix, 0) == 0) continue;
    out += line + "\n";
  }
  return out;
}

Report recheck(const std::string& text, bool with_search) {
  CheckOptions o;
  if (with_search) o.search = default_search_hook();
  return check_module(parse_module(text), o);
}

std::vector<std::string> event_types(const Session& s) {
  std::vector<std::string> out;
  for (const auto& e : s.transcript()) out.push_back(e.type);
  return out;
}

const char* kParity = R"(data ℕ = Zero | S(ℕ)

rule even-zero : ⊢ Even(Zero)
rule even-s for all (n : ℕ) : Odd(n) ⊢ Even(S(n))
rule odd-s for all (n : ℕ) : Even(n) ⊢ Odd(S(n))

theorem parity-twice : (∀ (n : ℕ) : Even(n) ∨ Odd(n)) ∧ (∀ (n : ℕ) : Even(n) ∨ Odd(n))
prove (∀ (n : ℕ) : Even(n) ∨ Odd(n)) ∧ (∀ (n : ℕ) : Even(n) ∨ Odd(n))
)";

const char* kParityStep = R"(1: | e: Even(m₁)
   |---
   | 2: Odd(S(m₁)) by rule odd-s on e
   | Even(S(m₁)) ∨ Odd(S(m₁)) by rule ∨-intro on 2
3: | o: Odd(m₁)
   |---
   | 4: Even(S(m₁)) by rule even-s on o
   | Even(S(m₁)) ∨ Odd(S(m₁)) by rule ∨-intro on 4
Even(S(m₁)) ∨ Odd(S(m₁)) by rule ∨-elim on ind-hyp₁, 1, 3
)";

}  // namespace

TEST(Session, SuspendsOnceWithTheGoldenPrompt) {
  Session s(load_module("fixtures/peano.proof"), "sum-total-comm", fixed());
  ASSERT_EQ(s.phase(), Phase::AwaitingUser);
  ASSERT_EQ(s.holes().size(), 1u);
  ASSERT_TRUE(s.prompt());
  EXPECT_EQ(s.prompt()->text, read_file("tests/golden/s2_4_prompt.txt"));
  ASSERT_EQ(s.prompt()->hypotheses.size(), 2u);
  EXPECT_EQ(s.prompt()->hypotheses[0].first, "ind-hyp₁");
  EXPECT_FALSE(s.prompt()->trace.empty());
}

TEST(Session, FragmentCompletesTheProof) {
  ModuleAST m = load_module("fixtures/peano.proof");
  Session s(m, "sum-total-comm", fixed());
  SubmitResult r = s.submit(UserResponse::fragment(fragment()));
  ASSERT_TRUE(r.accepted) << r.error->message;
  EXPECT_EQ(s.phase(), Phase::Done);
  EXPECT_FALSE(s.prompt());
  DerivationPtr d = s.derivation();
  ASSERT_TRUE(d);
  EXPECT_FALSE(has_gaps(d));
  EXPECT_EQ(validate(d, m.signature, library_before(m, "sum-total-comm")), std::nullopt);
}

TEST(Session, GappedElaborationIsTheManualProof) {
  ModuleAST m = load_module("fixtures/peano.proof");
  Session s(m, "sum-total-comm", fixed());
  ASSERT_TRUE(s.submit(UserResponse::fragment(fragment())).accepted);
  std::string text = s.elaborate_module(ElaborationMode::Gapped);
  Report r = recheck(text, true);
  EXPECT_TRUE(r.all_proved());
  ModuleAST back = parse_module(text);
  EXPECT_EQ(normalize_labels(back.find_theorem("sum-total-comm")->proof),
            normalize_labels(m.find_theorem("sum-total-comm")->proof));
}

TEST(Session, FullElaborationNeedsNoSearch) {
  Session s(load_module("fixtures/peano.proof"), "sum-total-comm", fixed());
  ASSERT_TRUE(s.submit(UserResponse::fragment(fragment())).accepted);
  std::string text = s.elaborate_module(ElaborationMode::Full);
  EXPECT_EQ(text.find("prove"), std::string::npos);
  Report r = recheck(text, false);
  for (const auto& t : r.theorems) EXPECT_TRUE(t.proved) << t.name << ": " << (t.error ? t.error->message : "");
}

TEST(Session, DanglingReferenceKeepsThePrompt) {
  Session s(load_module("fixtures/peano.proof"), "sum-total-comm", fixed());
  std::string broken = drop_line(fragment(), "7:");
  SubmitResult r = s.submit(UserResponse::fragment(broken));
  EXPECT_FALSE(r.accepted);
  ASSERT_TRUE(r.error);
  EXPECT_EQ(r.error->code, "UnknownLabel");
  EXPECT_EQ(r.error->label, "11");
  EXPECT_EQ(r.error->line, 9);
  EXPECT_NE(r.error->message.find("7"), std::string::npos);
  EXPECT_EQ(s.phase(), Phase::AwaitingUser);
  EXPECT_TRUE(s.submit(UserResponse::fragment(fragment())).accepted);
  EXPECT_EQ(s.phase(), Phase::Done);
}

TEST(Session, WrongConclusionIsRejected) {
  Session s(load_module("fixtures/peano.proof"), "sum-total-comm", fixed());
  SubmitResult r = s.submit(UserResponse::fragment("Sum(Zero, m₁, m₁) by rule sum-zero\n"));
  ASSERT_TRUE(r.error);
  EXPECT_EQ(r.error->code, "ResultMismatch");
  EXPECT_EQ(s.phase(), Phase::AwaitingUser);
}

TEST(Session, SyntaxErrorsCarryPositions) {
  Session s(load_module("fixtures/peano.proof"), "sum-total-comm", fixed());
  SubmitResult r = s.submit(UserResponse::fragment("Sum(Zero, m₁, m₁) by rule\n"));
  ASSERT_TRUE(r.error);
  EXPECT_EQ(r.error->code, "ParseError");
  EXPECT_EQ(r.error->line, 1);
  EXPECT_GT(r.error->column, 0);
  EXPECT_EQ(s.phase(), Phase::AwaitingUser);
}

TEST(Session, CommandsAnswerWithoutChangingPhase) {
  Session s(load_module("fixtures/peano.proof"), "sum-total-comm", fixed());
  std::size_t before = s.transcript().size();
  SubmitResult t = s.submit(UserResponse::command(Command::Trace));
  EXPECT_TRUE(t.accepted);
  EXPECT_EQ(t.output, render_trace(s.prompt()->trace));
  EXPECT_EQ(s.phase(), Phase::AwaitingUser);
  EXPECT_GT(s.transcript().size(), before);

  SubmitResult c = s.submit(UserResponse::command(Command::Context));
  EXPECT_NE(c.output.find("ind-hyp₁ : "), std::string::npos);
  EXPECT_NE(c.output.find("ind-hyp₂ : "), std::string::npos);
  EXPECT_NE(c.output.find("m₂ : ℕ"), std::string::npos);

  SubmitResult u = s.submit(UserResponse{UserResponse::Kind::Command, "undo"});
  ASSERT_TRUE(u.error);
  EXPECT_EQ(u.error->code, "UnknownCommand");
  EXPECT_EQ(s.phase(), Phase::AwaitingUser);
}

TEST(Session, AbortFails) {
  Session s(load_module("fixtures/peano.proof"), "sum-total-comm", fixed());
  EXPECT_TRUE(s.submit(UserResponse::command(Command::Abort)).accepted);
  EXPECT_EQ(s.phase(), Phase::Failed);
  EXPECT_EQ(s.transcript().back().type, "failed");
  EXPECT_EQ(s.transcript().back().payload["reason"], "UserAbort");
  SubmitResult late = s.submit(UserResponse::fragment(fragment()));
  ASSERT_TRUE(late.error);
  EXPECT_EQ(late.error->code, "NotAwaitingUser");
}

TEST(Session, SkipLeavesAGap) {
  Session s(load_module("fixtures/peano.proof"), "sum-total-comm", fixed());
  EXPECT_TRUE(s.submit(UserResponse::command(Command::Skip)).accepted);
  EXPECT_EQ(s.phase(), Phase::DoneWithGaps);
  EXPECT_TRUE(has_gaps(s.derivation()));
  Block b = s.elaborate(ElaborationMode::Gapped);
  EXPECT_NE(pretty_print(b).find("prove ∃ (n₃ : ℕ) : Sum(S(m₁), S(m₂), n₃)"), std::string::npos);
}

TEST(Session, ProvedWithoutPrompting) {
  ModuleAST m = parse_module(std::string(kPeanoPrelude) +
                             "\ntheorem t : ∀ (n : ℕ) : ∃ (k : ℕ) : Sum(Zero, n, k)\nprove ∀ (n : ℕ) : ∃ (k : ℕ) : Sum(Zero, n, k)\n");
  Session s(m, "t", fixed());
  EXPECT_EQ(s.phase(), Phase::Done);
  EXPECT_FALSE(s.prompt());
  Block gapped = s.elaborate(ElaborationMode::Gapped);
  ASSERT_EQ(gapped.size(), 1u);
  ASSERT_TRUE(gapped[0].is_line());
  EXPECT_EQ(gapped[0].line().just.kind, JustKind::Prove);
  EXPECT_TRUE(recheck(s.elaborate_module(ElaborationMode::Gapped), true).all_proved());
  EXPECT_TRUE(recheck(s.elaborate_module(ElaborationMode::Full), false).all_proved());
}

TEST(Session, EmptyRuleSetPrompts) {
  ModuleAST m = parse_module("data ℕ = Zero | S(ℕ)\n");
  SearchEnv env;
  env.signature = &m.signature;
  Formula goal = parse_formula("Sum(Zero, Zero, Zero)", m.signature);
  Session s(env, goal, "lonely", fixed());
  ASSERT_EQ(s.phase(), Phase::AwaitingUser);
  EXPECT_TRUE(alpha_equal(s.prompt()->goal, goal));
  EXPECT_TRUE(s.prompt()->trace.empty() || s.prompt()->trace.back().kind != StepKind::PickedInduction);
}

TEST(Session, HolesArePromptedDepthFirst) {
  ModuleAST m = parse_module(kParity);
  Session s(m, "parity-twice", fixed());
  ASSERT_EQ(s.phase(), Phase::AwaitingUser);
  ASSERT_EQ(s.holes().size(), 2u);
  EXPECT_EQ(s.prompt()->hole, 0u);
  ASSERT_TRUE(s.submit(UserResponse::fragment(kParityStep)).accepted);
  ASSERT_EQ(s.phase(), Phase::AwaitingUser);
  EXPECT_EQ(s.prompt()->hole, 1u);
  ASSERT_TRUE(s.submit(UserResponse::fragment(kParityStep)).accepted);
  EXPECT_EQ(s.phase(), Phase::Done);
  EXPECT_TRUE(recheck(s.elaborate_module(ElaborationMode::Gapped), true).all_proved());
  Report full = recheck(s.elaborate_module(ElaborationMode::Full), false);
  for (const auto& t : full.theorems) EXPECT_TRUE(t.proved) << (t.error ? t.error->message : "");
}

TEST(Session, FragmentsMayUseProve) {
  Session s(load_module("fixtures/peano.proof"), "sum-total-comm", fixed());
  std::string text = fragment();
  // replace line 7 by a search call
  std::string from = "7: Sum(S(m₁), S(m₂), S(N₃)) by rule sum-s on 5";
  text.replace(text.find(from), from.size(), "7: prove Sum(S(m₁), S(m₂), S(N₃))");
  SubmitResult r = s.submit(UserResponse::fragment(text));
  ASSERT_TRUE(r.accepted) << r.error->message;
  std::string full = s.elaborate_module(ElaborationMode::Full);
  EXPECT_EQ(full.find("prove"), std::string::npos);
  EXPECT_TRUE(recheck(full, false).all_proved());
}

TEST(Transcript, EventsAreTimestampedJsonLines) {
  Session s(load_module("fixtures/peano.proof"), "sum-total-comm", fixed());
  s.submit(UserResponse::command(Command::Trace));
  s.submit(UserResponse::fragment(fragment()));
  std::vector<std::string> types = event_types(s);
  std::vector<std::string> expected{"start", "search", "prompt", "response", "verdict", "response", "verdict", "done"};
  EXPECT_EQ(types, expected);
  EXPECT_EQ(s.transcript()[0].timestamp, "2000-01-01T00:00:00Z");
  EXPECT_EQ(s.transcript()[1].timestamp, "2000-01-01T00:00:01Z");
  std::string jsonl = transcript_to_jsonl(s.transcript());
  auto back = transcript_from_jsonl(jsonl);
  ASSERT_EQ(back.size(), s.transcript().size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].type, s.transcript()[i].type);
    EXPECT_EQ(back[i].timestamp, s.transcript()[i].timestamp);
    EXPECT_EQ(back[i].payload, s.transcript()[i].payload);
  }
}

TEST(Transcript, ReplayIsDeterministic) {
  ModuleAST m = load_module("fixtures/peano.proof");
  Session a(m, "sum-total-comm", fixed());
  a.submit(UserResponse::fragment(drop_line(fragment(), "7:")));
  a.submit(UserResponse::command(Command::Context));
  a.submit(UserResponse::fragment(fragment()));
  ASSERT_EQ(a.phase(), Phase::Done);

  auto recorded = transcript_from_jsonl(transcript_to_jsonl(a.transcript()));
  Session b(m, "sum-total-comm", fixed());
  for (const auto& r : responses_of(recorded)) b.submit(r);
  EXPECT_EQ(transcript_to_jsonl(a.transcript()), transcript_to_jsonl(b.transcript()));
  EXPECT_EQ(a.elaborate_module(ElaborationMode::Gapped), b.elaborate_module(ElaborationMode::Gapped));
  EXPECT_EQ(a.elaborate_module(ElaborationMode::Full), b.elaborate_module(ElaborationMode::Full));
}

TEST(Transcript, WallClockTimestamps) {
  std::string t = utc_now();
  ASSERT_EQ(t.size(), 24u);
  EXPECT_EQ(t[10], 'T');
  EXPECT_EQ(t.back(), 'Z');
}
