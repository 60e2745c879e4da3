#include <gtest/gtest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fitchmi/cli.hpp"
#include "support/fixtures.hpp"

using namespace fitchmi;
using namespace fitchmi::testing;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = -1;
  std::string out, err;
};

Outcome cli(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  Outcome r;
  r.code = run_cli(args, in, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() / ("fitchmi-cli-" + std::to_string(::getpid()) + "-" + std::to_string(counter_++));
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
  static inline int counter_ = 0;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kPeano = fixture_path("fixtures/peano.proof");
const std::string kScript = fixture_path("fixtures/s2_4.responses");

}  // namespace

TEST(CliCheck, ProvedModuleExitsZero) {
  Outcome r = cli({"check", kPeano});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, "sum-zero-rhs: Proved\nsum-s-rhs: Proved\nsum-total-comm: Proved\n");
}

TEST(CliCheck, BrokenModuleExitsOneAtTheMutatedLine) {
  Outcome r = cli({"check", fixture_path("fixtures/peano_broken.proof")});
  EXPECT_EQ(r.code, kExitFailed);
  EXPECT_NE(r.out.find("sum-total-comm: Failed\n  line 75,"), std::string::npos);
}

TEST(CliCheck, MissingFileExitsTwo) {
  Outcome r = cli({"check", "missing.proof"});
  EXPECT_EQ(r.code, kExitParse);
  EXPECT_NE(r.err.find("file not found"), std::string::npos);
}

TEST(CliCheck, ParseErrorExitsTwo) {
  TempDir d;
  std::ofstream(d.file("bad.proof")) << "data ℕ = Zero | S(ℕ)\nrule r : ⊢\n";
  Outcome r = cli({"check", d.file("bad.proof")});
  EXPECT_EQ(r.code, kExitParse);
  EXPECT_NE(r.err.find(":2:"), std::string::npos);
}

TEST(CliCheck, UsageErrorsExitSixtyFour) {
  EXPECT_EQ(cli({}).code, kExitUsage);
  EXPECT_EQ(cli({"check"}).code, kExitUsage);
  EXPECT_EQ(cli({"check", kPeano, "--diagnostics", "xml"}).code, kExitUsage);
  EXPECT_EQ(cli({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(cli({"--help"}).code, kExitOk);
}

TEST(CliCheck, NoAutoRejectsProveLines) {
  Outcome r = cli({"check", kPeano, "--no-auto"});
  EXPECT_EQ(r.code, kExitFailed);
  EXPECT_NE(r.out.find("AutoDisabled"), std::string::npos);
}

TEST(CliCheck, JsonDiagnostics) {
  Outcome r = cli({"check", fixture_path("fixtures/peano_broken.proof"), "--diagnostics", "json"});
  EXPECT_EQ(r.code, kExitFailed);
  auto j = nlohmann::json::parse(r.out);
  EXPECT_FALSE(j["ok"]);
  EXPECT_EQ(j["theorems"][2]["error"]["line"], 75);
  Outcome missing = cli({"check", "missing.proof", "--diagnostics", "json"});
  EXPECT_EQ(missing.code, kExitParse);
  EXPECT_EQ(nlohmann::json::parse(missing.out)["error"]["code"], "FileNotFound");
}

TEST(CliCheck, MaxDepthLimitsProve) {
  EXPECT_EQ(cli({"check", kPeano, "--max-depth", "0"}).code, kExitFailed);
  EXPECT_EQ(cli({"check", kPeano, "--max-depth", "4"}).code, kExitOk);
}

TEST(CliProve, ScriptedSessionWritesACheckableModule) {
  TempDir d;
  Outcome r = cli({"prove", kPeano, "sum-total-comm", "--script", kScript, "--elaborate", "gapped", "--out",
               d.file("out.proof"), "--transcript", d.file("t.jsonl")});
  ASSERT_EQ(r.code, kExitOk) << r.out << r.err;
  EXPECT_EQ(r.out.find(read_file("tests/golden/s2_4_prompt.txt")), 0u);
  EXPECT_NE(r.out.find("Proved sum-total-comm"), std::string::npos);
  EXPECT_EQ(cli({"check", d.file("out.proof")}).code, kExitOk);
  EXPECT_FALSE(slurp(d.file("t.jsonl")).empty());
}

TEST(CliProve, FullElaborationChecksWithoutSearch) {
  TempDir d;
  ASSERT_EQ(cli({"prove", kPeano, "sum-total-comm", "--script", kScript, "--elaborate", "full", "--out",
                 d.file("full.proof")}).code,
            kExitOk);
  EXPECT_EQ(cli({"check", d.file("full.proof"), "--no-auto"}).code, kExitOk);
}

TEST(CliProve, ScriptedRunsAreBitDeterministic) {
  TempDir d;
  auto run = [&](const std::string& tag) {
    Outcome r = cli({"prove", kPeano, "sum-total-comm", "--script", kScript, "--out", d.file(tag + ".proof"),
                 "--transcript", d.file(tag + ".jsonl")});
    return r.out + "\n" + slurp(d.file(tag + ".proof")) + "\n" + slurp(d.file(tag + ".jsonl"));
  };
  EXPECT_EQ(run("a"), run("b"));
}

TEST(CliProve, ReplayOfATranscript) {
  TempDir d;
  ASSERT_EQ(cli({"prove", kPeano, "sum-total-comm", "--script", kScript, "--transcript", d.file("t.jsonl"), "--out",
                 d.file("a.proof")}).code,
            kExitOk);
  ASSERT_EQ(cli({"prove", kPeano, "sum-total-comm", "--replay", d.file("t.jsonl"), "--out", d.file("b.proof")}).code,
            kExitOk);
  EXPECT_EQ(slurp(d.file("a.proof")), slurp(d.file("b.proof")));
}

TEST(CliProve, InteractiveAbortExitsOne) {
  Outcome r = cli({"prove", kPeano, "sum-total-comm"}, "context\ntrace\nabort\n");
  EXPECT_EQ(r.code, kExitFailed);
  EXPECT_NE(r.out.find("ind-hyp₁ : "), std::string::npos);
  EXPECT_NE(r.out.find("Failed: UserAbort"), std::string::npos);
}

TEST(CliProve, InteractiveModeRepromptsAfterErrors) {
  std::string input = "Sum(Zero, m₁ by rule\n.\n" + read_file("fixtures/s2_4_fragment.txt") + ".\n";
  Outcome r = cli({"prove", kPeano, "sum-total-comm"}, input);
  EXPECT_EQ(r.code, kExitOk) << r.out;
  EXPECT_NE(r.out.find("error: line 1"), std::string::npos);
  EXPECT_NE(r.out.find("Proved sum-total-comm"), std::string::npos);
}

TEST(CliProve, ScriptedParseErrorExitsNonZero) {
  TempDir d;
  std::ofstream(d.file("bad.responses")) << "Sum(Zero, m₁ by rule\n.\n";
  EXPECT_EQ(cli({"prove", kPeano, "sum-total-comm", "--script", d.file("bad.responses")}).code, kExitFailed);
}

TEST(CliProve, SearchAloneNeedsNoPrompt) {
  Outcome r = cli({"prove", kPeano, "sum-zero-rhs", "--elaborate", "gapped"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out.find("I am solving"), std::string::npos);
  EXPECT_NE(r.out.find("prove ∀ (n : ℕ) : Sum(n, Zero, n)"), std::string::npos);
}

TEST(CliProve, UnknownTheoremIsAUsageError) {
  EXPECT_EQ(cli({"prove", kPeano, "nope"}).code, kExitUsage);
}

TEST(CliProve, BrokenPrefixRefuses) {
  TempDir d;
  std::string text = std::string(kPeanoPrelude) +
                     "\ntheorem bad : Sum(Zero, Zero, S(Zero))\nSum(Zero, Zero, S(Zero)) by rule sum-zero\n"
                     "\ntheorem next : Sum(Zero, Zero, Zero)\nprove Sum(Zero, Zero, Zero)\n";
  std::ofstream(d.file("m.proof")) << text;
  EXPECT_EQ(cli({"prove", d.file("m.proof"), "next"}).code, kExitFailed);
}

TEST(ReadResponse, CommandsAndFragments) {
  std::istringstream in("\n  trace \nline one\nline two\n.\nskip\nlast line\n");
  auto a = read_response(in);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->kind, UserResponse::Kind::Command);
  EXPECT_EQ(a->text, "trace");
  auto b = read_response(in);
  ASSERT_TRUE(b);
  EXPECT_EQ(b->kind, UserResponse::Kind::Fragment);
  EXPECT_EQ(b->text, "line one\nline two\n");
  EXPECT_EQ(read_response(in)->text, "skip");
  EXPECT_EQ(read_response(in)->text, "last line\n");
  EXPECT_FALSE(read_response(in));
}
