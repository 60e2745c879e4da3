#include "fitchmi/session.hpp"

#include <chrono>
#include <ctime>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace fitchmi {

using nlohmann::json;

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::AwaitingUser: return "AwaitingUser";
    case Phase::Done: return "Done";
    case Phase::DoneWithGaps: return "DoneWithGaps";
    case Phase::Failed: return "Failed";
  }
  return "?";
}

std::string_view to_string(Command c) {
  switch (c) {
    case Command::Context: return "context";
    case Command::Trace: return "trace";
    case Command::Abort: return "abort";
    case Command::Skip: return "skip";
  }
  return "?";
}

std::optional<Command> command_from_name(std::string_view name) {
  for (Command c : {Command::Context, Command::Trace, Command::Abort, Command::Skip})
    if (to_string(c) == name) return c;
  return std::nullopt;
}

std::string utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%S") << '.' << std::setw(3) << std::setfill('0') << ms << 'Z';
  return os.str();
}

Clock fixed_clock(std::string start) {
  std::tm tm{};
  std::istringstream in(start);
  in >> std::get_time(&tm, "%Y-%m-%dT%H:%M:%S");
  if (in.fail()) throw std::invalid_argument("bad timestamp " + start);
  std::time_t base = timegm(&tm);
  auto n = std::make_shared<long>(0);
  return [base, n] {
    std::time_t t = base + (*n)++;
    std::tm out{};
    gmtime_r(&t, &out);
    std::ostringstream os;
    os << std::put_time(&out, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
  };
}

namespace {

void prop_params(const Formula& f, std::vector<std::string>& out) {
  if (f.kind == Connective::PropParam && std::find(out.begin(), out.end(), f.name) == out.end()) out.push_back(f.name);
  for (const auto& p : f.parts) prop_params(p, out);
}

json labelled(const std::vector<LabelledFormula>& hs) {
  json a = json::array();
  for (const auto& [l, f] : hs) a.push_back({{"label", l}, {"formula", to_string(f)}});
  return a;
}

json error_json(const FragmentError& e) {
  return {{"code", e.code}, {"message", e.message}, {"line", e.line}, {"column", e.column}, {"label", e.label}};
}

DerivationPtr graft(const DerivationPtr& d, const std::vector<DerivationPtr>& fills, std::size_t& next) {
  if (!d) return d;
  if (d->kind == RuleKind::Gap) {
    const DerivationPtr& f = fills.at(next++);
    return f ? f : d;
  }
  bool changed = false;
  std::vector<DerivationPtr> ps;
  for (const auto& p : d->premises) {
    ps.push_back(graft(p, fills, next));
    changed = changed || ps.back() != p;
  }
  if (!changed) return d;
  auto copy = std::make_shared<Derivation>(*d);
  copy->premises = std::move(ps);
  return copy;
}

std::size_t count_gaps(const DerivationPtr& d) {
  if (!d) return 0;
  std::size_t n = d->kind == RuleKind::Gap;
  for (const auto& p : d->premises) n += count_gaps(p);
  return n;
}

}  // namespace

Session::Session(const ModuleAST& module, const std::string& theorem, SessionOptions opts)
    : module_(std::make_shared<ModuleAST>(module)), name_(theorem), opts_(std::move(opts)) {
  const TheoremDecl* t = module_->find_theorem(theorem);
  if (!t) throw std::invalid_argument("no theorem named " + theorem);
  Substitution rigid;
  for (const auto& p : t->params) rigid.bind_schematic(p.name, Term::rigid(p.name, p.sort));
  goal_ = substitute(t->target(), rigid);
  props_ = t->prop_params;
  env_.signature = &module_->signature;
  env_.library = library_before(*module_, theorem);
  env_.eigenvariables = t->params;
  start();
}

Session::Session(SearchEnv env, Formula goal, std::string name, SessionOptions opts)
    : name_(std::move(name)), env_(std::move(env)), goal_(std::move(goal)), opts_(std::move(opts)) {
  prop_params(goal_, props_);
  start();
}

void Session::record(const std::string& type, json payload) {
  transcript_.push_back({type, clock_(), std::move(payload)});
}

void Session::start() {
  clock_ = opts_.clock ? opts_.clock : Clock(utc_now);
  json eigen = json::array();
  for (const auto& b : env_.eigenvariables) eigen.push_back({{"name", b.name}, {"sort", b.sort}});
  record("start", {{"theorem", name_}, {"goal", to_string(goal_)}, {"eigenvariables", eigen}});

  SearchOptions so;
  so.max_depth = opts_.max_depth;
  so.allow_holes = true;
  SearchOutcome out = search(goal_, env_, so);
  switch (out.kind) {
    case SearchOutcome::Kind::Proved:
      skeleton_ = out.derivation;
      record("search", {{"result", "proved"}, {"holes", 0}});
      advance();
      return;
    case SearchOutcome::Kind::Partial:
      skeleton_ = out.derivation;
      holes_ = std::move(out.holes);
      fills_.resize(holes_.size());
      record("search", {{"result", "partial"}, {"holes", holes_.size()}});
      if (count_gaps(skeleton_) != holes_.size()) throw std::logic_error("search holes out of step with its gaps");
      current_ = 0;
      open_prompt();
      return;
    case SearchOutcome::Kind::Stuck:
      phase_ = Phase::Failed;
      record("search", {{"result", "stuck"}, {"holes", 0}, {"trace", render_trace(out.trace)}});
      record("failed", {{"reason", "search is stuck on " + to_string(out.stuck_goal)}});
      return;
  }
}

void Session::open_prompt() {
  const Hole& h = holes_.at(current_);
  Prompt p;
  p.theorem = name_;
  p.hole = current_;
  p.goal = h.goal;
  p.trace = h.trace;
  p.hypotheses = h.hypotheses;
  p.text = render_prompt(name_, h.trace, h.goal);
  phase_ = Phase::AwaitingUser;
  record("prompt", {{"hole", current_},
                    {"goal", to_string(h.goal)},
                    {"trace", render_trace(h.trace)},
                    {"hypotheses", labelled(h.hypotheses)},
                    {"text", p.text}});
  prompt_ = std::move(p);
}

void Session::advance() {
  if (skeleton_ && current_ + 1 < holes_.size()) {
    ++current_;
    open_prompt();
    return;
  }
  prompt_.reset();
  bool gaps = std::any_of(fills_.begin(), fills_.end(), [](const Fill& f) { return f.skipped; });
  DerivationPtr d = derivation();
  ValidationOptions vo;
  vo.allow_gaps = gaps;
  std::vector<LabelledFormula> assumptions;
  for (const auto& f : env_.facts) assumptions.emplace_back(f.label, f.formula);
  static const Signature empty;
  auto bad = validate(d, env_.signature ? *env_.signature : empty, env_.library, assumptions, env_.eigenvariables, vo);
  if (bad) {
    phase_ = Phase::Failed;
    record("failed", {{"reason", "assembled derivation is invalid: " + *bad}});
    return;
  }
  phase_ = gaps ? Phase::DoneWithGaps : Phase::Done;
  record("done", {{"phase", std::string(to_string(phase_))}, {"size", d->size()}});
}

SubmitResult Session::submit(const UserResponse& response) {
  SubmitResult r;
  if (phase_ != Phase::AwaitingUser) {
    r.error = FragmentError{"NotAwaitingUser", "the session is " + std::string(to_string(phase_)), 0, 0, ""};
    return r;
  }
  bool is_command = response.kind == UserResponse::Kind::Command;
  record("response", {{"kind", is_command ? "command" : "fragment"}, {"text", response.text}});
  if (is_command) {
    auto c = command_from_name(response.text);
    if (c) {
      r = run_command(*c);
    } else {
      r.error = FragmentError{"UnknownCommand", "unknown command `" + response.text + "'", 0, 0, ""};
    }
  } else {
    r = submit_fragment(response.text);
  }
  json v = {{"accepted", r.accepted}, {"phase", std::string(to_string(phase_))}};
  if (r.error) v["error"] = error_json(*r.error);
  if (!r.output.empty()) v["output"] = r.output;
  record("verdict", v);
  if (r.accepted && !is_command) advance();
  if (r.accepted && is_command && response.text == "skip") advance();
  if (r.accepted && is_command && response.text == "abort") record("failed", {{"reason", "UserAbort"}});
  return r;
}

SubmitResult Session::run_command(Command c) {
  SubmitResult r;
  r.accepted = true;
  const Hole& h = holes_.at(current_);
  switch (c) {
    case Command::Context: {
      std::string out;
      for (const auto& b : h.env.eigenvariables) out += b.name + " : " + b.sort + "\n";
      for (auto it = h.env.facts.rbegin(); it != h.env.facts.rend(); ++it)
        out += it->label + " : " + to_string(it->formula) + "\n";
      r.output = out;
      break;
    }
    case Command::Trace:
      r.output = render_trace(h.trace);
      break;
    case Command::Abort:
      phase_ = Phase::Failed;
      prompt_.reset();
      break;
    case Command::Skip:
      fills_.at(current_).skipped = true;
      break;
  }
  return r;
}

SubmitResult Session::submit_fragment(const std::string& text) {
  SubmitResult r;
  const Hole& h = holes_.at(current_);
  static const Signature empty;
  const Signature& sig = h.env.signature ? *h.env.signature : empty;
  Block block;
  try {
    block = parse_fragment(text, sig, FragmentScope{h.env.eigenvariables, h.env.labels, props_});
  } catch (const ParseError& e) {
    r.error = FragmentError{"ParseError", e.message(), e.line(), e.column(), ""};
    return r;
  }
  auto proved = std::make_shared<std::map<std::string, DerivationPtr>>();
  CheckOptions co;
  SearchHook inner = default_search_hook(opts_.max_depth);
  co.search = [inner, proved](const Formula& goal, const SearchEnv& env) {
    ProveResult pr = inner(goal, env);
    if (pr.derivation) (*proved)[prove_key(goal, env.eigenvariables)] = pr.derivation;
    return pr;
  };
  BlockResult br = check_block(block, h.env, co);
  if (br.error) {
    const CheckError& e = *br.error;
    r.error = FragmentError{std::string(to_string(e.code)), e.message, e.pos.line, e.pos.column, e.label};
    return r;
  }
  if (!alpha_equal(br.result, h.goal)) {
    SourcePos pos = block.empty() ? SourcePos{} : block.back().pos();
    r.error = FragmentError{"ResultMismatch",
                            "the fragment concludes `" + to_string(br.result) + "', not `" + to_string(h.goal) + "'",
                            pos.line, pos.column, block.empty() ? "" : block.back().label()};
    return r;
  }
  std::vector<LabelledFormula> assumptions;
  for (const auto& f : h.env.facts) assumptions.emplace_back(f.label, f.formula);
  if (auto bad = validate(br.derivation, sig, h.env.library, assumptions, h.env.eigenvariables)) {
    r.error = FragmentError{"InvalidDerivation", *bad, 0, 0, ""};
    return r;
  }
  Fill& f = fills_.at(current_);
  f.fragment = std::move(block);
  f.derivation = br.derivation;
  f.proved = *proved;
  r.accepted = true;
  return r;
}

DerivationPtr Session::derivation() const {
  if (!skeleton_) return nullptr;
  std::vector<DerivationPtr> fills;
  for (const auto& f : fills_) fills.push_back(f.skipped ? nullptr : f.derivation);
  std::size_t next = 0;
  return graft(skeleton_, fills, next);
}

Block Session::elaborate(ElaborationMode mode) const {
  if (phase_ != Phase::Done && phase_ != Phase::DoneWithGaps)
    throw std::logic_error("elaboration needs a finished session");
  std::vector<HoleFill> fills;
  for (const auto& f : fills_) fills.push_back({f.skipped, &f.fragment, f.derivation, &f.proved});
  return elaborate_derivation(skeleton_, fills, mode, env_.eigenvariables);
}

std::string Session::elaborate_module(ElaborationMode mode) const {
  if (!module_) throw std::logic_error("session was not started from a module");
  return pretty_print(replace_proof(*module_, name_, elaborate(mode)));
}

std::vector<UserResponse> responses_of(const std::vector<TranscriptEvent>& transcript) {
  std::vector<UserResponse> out;
  for (const auto& e : transcript) {
    if (e.type != "response") continue;
    UserResponse r;
    r.kind = e.payload.at("kind") == "command" ? UserResponse::Kind::Command : UserResponse::Kind::Fragment;
    r.text = e.payload.at("text").get<std::string>();
    out.push_back(std::move(r));
  }
  return out;
}

json to_json(const TranscriptEvent& e) {
  return {{"type", e.type}, {"timestamp", e.timestamp}, {"payload", e.payload}};
}

TranscriptEvent event_from_json(const json& j) {
  return {j.at("type").get<std::string>(), j.at("timestamp").get<std::string>(), j.at("payload")};
}

std::string transcript_to_jsonl(const std::vector<TranscriptEvent>& events) {
  std::string out;
  for (const auto& e : events) out += to_json(e).dump() + "\n";
  return out;
}

std::vector<TranscriptEvent> transcript_from_jsonl(std::string_view text) {
  std::vector<TranscriptEvent> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(event_from_json(json::parse(line)));
  }
  return out;
}

}  // namespace fitchmi
