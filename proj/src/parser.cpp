#include <algorithm>
#include <memory>
#include <set>

#include "fitchmi/surface.hpp"
#include "utf8.hpp"

namespace fitchmi {

namespace {

enum class Tok {
  End,
  Ident,
  Number,
  LParen,
  RParen,
  Comma,
  Colon,
  Equals,
  Bar,
  Arrow,
  Forall,
  Exists,
  And,
  Or,
  Implies,
  Not,
  Turnstile,
  Bottom,
  Other,
};

std::string tok_name(Tok t) {
  switch (t) {
    case Tok::End: return "end of line";
    case Tok::Ident: return "identifier";
    case Tok::Number: return "number";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Comma: return "','";
    case Tok::Colon: return "':'";
    case Tok::Equals: return "'='";
    case Tok::Bar: return "'|'";
    case Tok::Arrow: return "'->'";
    case Tok::Forall: return "'∀'";
    case Tok::Exists: return "'∃'";
    case Tok::And: return "'∧'";
    case Tok::Or: return "'∨'";
    case Tok::Implies: return "'⟹'";
    case Tok::Not: return "'¬'";
    case Tok::Turnstile: return "'⊢'";
    case Tok::Bottom: return "'⊥'";
    case Tok::Other: return "symbol";
  }
  return "?";
}

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
  bool is(std::string_view word) const { return kind == Tok::Ident && text == word; }
};

enum class LineKind { Blank, Separator, Content };

struct RawLine {
  int number = 0;
  std::string text;
  int depth = 0;
  std::size_t content = 0;
  LineKind kind = LineKind::Blank;
};

std::vector<RawLine> split_lines(std::string_view text) {
  std::vector<RawLine> out;
  std::size_t start = 0;
  int number = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    RawLine l;
    l.number = ++number;
    l.text = std::string(text.substr(start, nl - start));
    if (!l.text.empty() && l.text.back() == '\r') l.text.pop_back();
    if (auto hash = l.text.find('#'); hash != std::string::npos) l.text.erase(hash);
    std::size_t p = 0;
    for (;;) {
      while (p < l.text.size() && (l.text[p] == ' ' || l.text[p] == '\t')) ++p;
      if (p < l.text.size() && l.text[p] == '|' && !(p + 1 < l.text.size() && l.text[p + 1] == '-' &&
                                                     !(p + 2 < l.text.size() && l.text[p + 2] == '-'))) {
        ++l.depth;
        ++p;
        continue;
      }
      break;
    }
    l.content = p;
    std::string_view rest = std::string_view(l.text).substr(p);
    while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\t')) rest.remove_suffix(1);
    if (rest.empty()) {
      l.kind = LineKind::Blank;
    } else if (rest.size() >= 3 && rest.find_first_not_of('-') == std::string_view::npos) {
      l.kind = LineKind::Separator;
    } else {
      l.kind = LineKind::Content;
    }
    out.push_back(std::move(l));
    if (nl == text.size()) break;
    start = nl + 1;
  }
  return out;
}

bool is_reserved(char32_t c) {
  switch (c) {
    case U'∀':
    case U'∃':
    case U'∧':
    case U'∨':
    case U'⟹':
    case U'⇒':
    case U'¬':
    case U'⊢':
    case U'⊥':
    case U'→':
    case 0xA0:
      return true;
    default:
      return false;
  }
}

bool ascii_alpha(char32_t c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool ascii_digit(char32_t c) { return c >= '0' && c <= '9'; }
bool ident_start(char32_t c) { return ascii_alpha(c) || c == '_' || (c >= 0x80 && !is_reserved(c)); }
bool ident_char(char32_t c) { return ident_start(c) || ascii_digit(c); }

std::string subscript_digits(std::string name) {
  std::size_t end = name.size();
  std::size_t start = end;
  while (start > 0 && ascii_digit(static_cast<unsigned char>(name[start - 1]))) --start;
  if (start == end || start == 0 || name[start - 1] == '-') return name;
  std::string out = name.substr(0, start);
  for (std::size_t i = start; i < end; ++i) out += utf8::encode(U'₀' + (name[i] - '0'));
  return out;
}

class Lexer {
 public:
  Lexer(const std::string& text, std::size_t pos) : text_(text), pos_(pos) {}

  std::size_t offset() const { return pos_; }
  void seek(std::size_t p) { pos_ = p; }

  Token peek() {
    std::size_t saved = pos_;
    Token t = next();
    pos_ = saved;
    return t;
  }

  Token peek2() {
    std::size_t saved = pos_;
    next();
    Token t = next();
    pos_ = saved;
    return t;
  }

  Token next() {
    skip_space();
    Token t;
    t.begin = pos_;
    if (pos_ >= text_.size()) {
      t.kind = Tok::End;
      t.end = pos_;
      return t;
    }
    std::size_t len = 0;
    char32_t c = utf8::decode(text_, pos_, &len);
    auto single = [&](Tok k) {
      pos_ += len;
      t.kind = k;
      t.text = text_.substr(t.begin, pos_ - t.begin);
      t.end = pos_;
      return t;
    };
    auto ascii = [&](std::string_view s) { return text_.compare(pos_, s.size(), s) == 0; };
    if (ascii("==>")) {
      pos_ += 3;
      return finish(t, Tok::Implies);
    }
    if (ascii("/\\")) {
      pos_ += 2;
      return finish(t, Tok::And);
    }
    if (ascii("\\/")) {
      pos_ += 2;
      return finish(t, Tok::Or);
    }
    if (ascii("|-")) {
      pos_ += 2;
      return finish(t, Tok::Turnstile);
    }
    if (ascii("->")) {
      pos_ += 2;
      return finish(t, Tok::Arrow);
    }
    switch (c) {
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case ',': return single(Tok::Comma);
      case ':': return single(Tok::Colon);
      case '=': return single(Tok::Equals);
      case '|': return single(Tok::Bar);
      case '~': return single(Tok::Not);
      case U'∀': return single(Tok::Forall);
      case U'∃': return single(Tok::Exists);
      case U'∧': return single(Tok::And);
      case U'∨': return single(Tok::Or);
      case U'⟹':
      case U'⇒': return single(Tok::Implies);
      case U'¬': return single(Tok::Not);
      case U'⊢': return single(Tok::Turnstile);
      case U'⊥': return single(Tok::Bottom);
      case U'→': return single(Tok::Arrow);
      default: break;
    }
    if (ascii_digit(c)) {
      while (pos_ < text_.size() && ascii_digit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return finish(t, Tok::Number);
    }
    if (ident_start(c)) {
      pos_ += len;
      while (pos_ < text_.size()) {
        std::size_t l = 0;
        char32_t d = utf8::decode(text_, pos_, &l);
        if (ident_char(d)) {
          pos_ += l;
          continue;
        }
        if (d == '-' || d == U'→') {
          std::size_t l2 = 0;
          if (pos_ + l < text_.size() && ident_char(utf8::decode(text_, pos_ + l, &l2))) {
            pos_ += l;
            continue;
          }
        }
        break;
      }
      finish(t, Tok::Ident);
      t.text = subscript_digits(t.text);
      if (t.text == "forall") t.kind = Tok::Forall;
      else if (t.text == "exists") t.kind = Tok::Exists;
      else if (t.text == "not") t.kind = Tok::Not;
      else if (t.text == "bottom") t.kind = Tok::Bottom;
      else if (t.text == "Nat") t.text = "ℕ";
      return t;
    }
    return single(Tok::Other);
  }

  // The next whitespace- or comma-delimited word, used for rule names such
  // as `∀-elim` that are not identifiers.
  Token word() {
    skip_space();
    Token t;
    t.begin = pos_;
    while (pos_ < text_.size() && text_[pos_] != ' ' && text_[pos_] != '\t' && text_[pos_] != ',') ++pos_;
    t.end = pos_;
    t.text = text_.substr(t.begin, pos_ - t.begin);
    t.kind = t.text.empty() ? Tok::End : Tok::Ident;
    return t;
  }

 private:
  Token& finish(Token& t, Tok k) {
    t.kind = k;
    t.end = pos_;
    t.text = text_.substr(t.begin, pos_ - t.begin);
    return t;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      if (text_[pos_] == ' ' || text_[pos_] == '\t') {
        ++pos_;
        continue;
      }
      std::size_t l = 0;
      if (utf8::decode(text_, pos_, &l) == 0xA0) {
        pos_ += l;
        continue;
      }
      break;
    }
  }

  const std::string& text_;
  std::size_t pos_;
};

struct Frame {
  std::vector<Binder> eigen;
  std::set<std::string> labels;
};

class Parser {
 public:
  Parser(std::vector<RawLine> lines, Signature sig) : lines_(std::move(lines)), sig_(std::move(sig)) {
    lines_.erase(std::remove_if(lines_.begin(), lines_.end(),
                                [](const RawLine& l) { return l.kind == LineKind::Blank; }),
                 lines_.end());
  }

  ModuleAST module() {
    ModuleAST out;
    std::size_t i = 0;
    while (i < lines_.size()) {
      const RawLine& l = lines_[i];
      Token head = start_line(l).next();
      if (l.depth != 0 || l.kind != LineKind::Content || !is_decl_keyword(head))
        error_at(l, l.content, "expected a declaration", {"data", "rule", "theorem"});
      std::size_t end = i + 1;
      while (end < lines_.size() && !(lines_[end].depth == 0 && lines_[end].kind == LineKind::Content &&
                                      is_decl_keyword(start_line(lines_[end]).next())))
        ++end;
      if (head.is("data")) {
        out.decls.push_back(data_decl(l));
        no_proof(i + 1, end);
      } else if (head.is("rule")) {
        out.decls.push_back(rule_decl(l));
        no_proof(i + 1, end);
      } else {
        out.decls.push_back(theorem_decl(l, i + 1, end));
      }
      i = end;
    }
    out.signature = sig_;
    return out;
  }

  Block fragment(const FragmentScope& scope) {
    props_ = scope.propositions;
    frames_.push_back(Frame{scope.eigenvariables, {}});
    ambient_labels_.insert(scope.labels.begin(), scope.labels.end());
    cur_ = 0;
    end_ = lines_.size();
    if (lines_.empty()) throw ParseError(ParseErrorKind::Syntax, 1, 1, "empty proof fragment", {"proof line"});
    Block b = block(0);
    trailing();
    return b;
  }

  Formula formula_only(const std::vector<Binder>& eigen) {
    frames_.push_back(Frame{eigen, {}});
    if (lines_.size() != 1) throw ParseError(ParseErrorKind::Syntax, 1, 1, "expected a single formula line");
    start_line(lines_[0]);
    Formula f = formula();
    expect_end();
    return f;
  }

 private:
  // ---- plumbing -------------------------------------------------------------

  Lexer& start_line(const RawLine& l) {
    line_ = &l;
    lexer_store_.emplace_back(std::make_unique<Lexer>(l.text, l.content));
    lex_ = lexer_store_.back().get();
    return *lex_;
  }

  static bool is_decl_keyword(const Token& t) { return t.is("data") || t.is("rule") || t.is("theorem"); }

  int column(const RawLine& l, std::size_t byte) const {
    return 1 + static_cast<int>(utf8::length(std::string_view(l.text).substr(0, std::min(byte, l.text.size()))));
  }

  [[noreturn]] void error_at(const RawLine& l, std::size_t byte, const std::string& msg,
                             std::vector<std::string> expected = {},
                             ParseErrorKind kind = ParseErrorKind::Syntax) const {
    throw ParseError(kind, l.number, column(l, byte), msg, std::move(expected));
  }

  [[noreturn]] void error(const Token& t, const std::string& msg, std::vector<std::string> expected = {},
                          ParseErrorKind kind = ParseErrorKind::Syntax) const {
    error_at(*line_, t.begin, msg, std::move(expected), kind);
  }

  [[noreturn]] void unexpected(const Token& t, std::vector<std::string> expected) const {
    std::string what = t.kind == Tok::End ? "end of line" : "'" + t.text + "'";
    error(t, "unexpected " + what, std::move(expected));
  }

  Token expect(Tok k) {
    Token t = lex_->next();
    if (t.kind != k) unexpected(t, {tok_name(k)});
    return t;
  }

  Token expect_word(std::string_view w) {
    Token t = lex_->next();
    if (!t.is(w)) unexpected(t, {std::string(w)});
    return t;
  }

  void expect_end() {
    Token t = lex_->peek();
    if (t.kind != Tok::End) unexpected(t, {"end of line"});
  }

  void no_proof(std::size_t from, std::size_t to) {
    if (from < to) error_at(lines_[from], lines_[from].content, "proof lines after a non-theorem declaration",
                            {"data", "rule", "theorem"});
  }

  void trailing() {
    if (cur_ < end_) {
      const RawLine& l = lines_[cur_];
      error_at(l, l.content, "unexpected line", {"proof line at depth 0"});
    }
  }

  // ---- declarations ---------------------------------------------------------

  void claim_name(const Token& t) {
    if (!names_.insert(t.text).second)
      error(t, "'" + t.text + "' is already declared", {}, ParseErrorKind::DuplicateName);
  }

  std::string sort_name(bool allow_self = false, const std::string& self = "") {
    Token t = lex_->next();
    if (t.kind != Tok::Ident) unexpected(t, {"sort"});
    if (!(allow_self && t.text == self) && !sig_.find_sort(t.text))
      error(t, "unknown sort '" + t.text + "'", {}, ParseErrorKind::UnknownIdentifier);
    return t.text;
  }

  DataDecl data_decl(const RawLine& l) {
    start_line(l);
    DataDecl d;
    Token kw = lex_->next();
    d.pos = pos_of(kw);
    Token name = expect(Tok::Ident);
    d.name = name.text;
    if (sig_.find_sort(d.name))
      error(name, "sort '" + d.name + "' is already declared", {}, ParseErrorKind::DuplicateName);
    expect(Tok::Equals);
    std::set<std::string> local;
    for (;;) {
      Token c = expect(Tok::Ident);
      if (sig_.find_constructor(c.text) || !local.insert(c.text).second)
        error(c, "constructor '" + c.text + "' is already declared", {}, ParseErrorKind::DuplicateName);
      ConstructorSig sig{c.text, {}};
      if (lex_->peek().kind == Tok::LParen) {
        lex_->next();
        for (;;) {
          sig.arg_sorts.push_back(sort_name(true, d.name));
          Token sep = lex_->next();
          if (sep.kind == Tok::RParen) break;
          if (sep.kind != Tok::Comma) unexpected(sep, {"','", "')'"});
        }
      }
      d.constructors.push_back(std::move(sig));
      Token sep = lex_->peek();
      if (sep.kind == Tok::Bar) {
        lex_->next();
        continue;
      }
      if (sep.kind != Tok::End) unexpected(sep, {"'|'", "end of line"});
      break;
    }
    try {
      sig_.add_sort(Sort{d.name, d.constructors});
    } catch (const SignatureError& e) {
      error(kw, e.what(), {}, ParseErrorKind::DuplicateName);
    }
    return d;
  }

  // `(a, b : σ) (c : τ)` repeated at least once.
  std::vector<Binder> binder_groups() {
    std::vector<Binder> out;
    while (lex_->peek().kind == Tok::LParen) {
      lex_->next();
      std::vector<std::string> names;
      for (;;) {
        Token v = expect(Tok::Ident);
        names.push_back(v.text);
        Token sep = lex_->next();
        if (sep.kind == Tok::Colon) break;
        if (sep.kind != Tok::Comma) unexpected(sep, {"','", "':'"});
      }
      std::string sort = sort_name();
      expect(Tok::RParen);
      for (auto& n : names) out.push_back(Binder{n, sort});
    }
    if (out.empty()) unexpected(lex_->peek(), {"'('"});
    return out;
  }

  // `[premise, …] ⊢ conclusion` or a bare conclusion.
  void sequent(std::vector<Formula>& premises, Formula& conclusion, bool& turnstile) {
    turnstile = false;
    std::vector<Formula> parts;
    if (lex_->peek().kind == Tok::Turnstile) {
      lex_->next();
      turnstile = true;
      conclusion = formula();
      expect_end();
      return;
    }
    for (;;) {
      parts.push_back(formula());
      Token t = lex_->peek();
      if (t.kind == Tok::Comma) {
        lex_->next();
        continue;
      }
      if (t.kind == Tok::Turnstile) {
        lex_->next();
        turnstile = true;
        premises = std::move(parts);
        conclusion = formula();
        expect_end();
        return;
      }
      if (t.kind != Tok::End) unexpected(t, {"','", "'⊢'", "end of line"});
      break;
    }
    if (parts.size() != 1) unexpected(lex_->peek(), {"'⊢'"});
    conclusion = std::move(parts.front());
  }

  RuleDecl rule_decl(const RawLine& l) {
    start_line(l);
    RuleDecl r;
    r.pos = pos_of(lex_->next());
    Token name = expect(Tok::Ident);
    claim_name(name);
    r.name = name.text;
    if (lex_->peek().is("for")) {
      lex_->next();
      expect_word("all");
      r.params = binder_groups();
    }
    expect(Tok::Colon);
    schematics_ = r.params;
    bool turnstile = false;
    Token at = lex_->peek();
    sequent(r.premises, r.conclusion, turnstile);
    schematics_.clear();
    if (!r.conclusion.is_literal()) error(at, "a rule must conclude a predicate", {"predicate"});
    return r;
  }

  TheoremDecl theorem_decl(const RawLine& l, std::size_t from, std::size_t to) {
    start_line(l);
    TheoremDecl t;
    t.pos = pos_of(lex_->next());
    if (lex_->peek().is("schema") && lex_->peek2().kind == Tok::Ident) {
      lex_->next();
      t.schema = true;
    }
    Token name = expect(Tok::Ident);
    claim_name(name);
    t.name = name.text;
    while (lex_->peek().is("for")) {
      lex_->next();
      expect_word("all");
      if (lex_->peek().is("propositions") || lex_->peek().is("proposition")) {
        lex_->next();
        for (;;) {
          t.prop_params.push_back(expect(Tok::Ident).text);
          if (lex_->peek().kind != Tok::Comma) break;
          lex_->next();
        }
      } else {
        auto more = binder_groups();
        t.params.insert(t.params.end(), more.begin(), more.end());
      }
    }
    expect(Tok::Colon);
    schematics_ = t.params;
    props_ = t.prop_params;
    sequent(t.premises, t.conclusion, t.turnstile);
    schematics_.clear();

    frames_.clear();
    frames_.push_back(Frame{t.params, {}});
    closed_labels_.clear();
    ambient_labels_.clear();
    cur_ = from;
    end_ = to;
    if (from < to) {
      t.proof = block(0);
      trailing();
    }
    frames_.clear();
    props_.clear();
    return t;
  }

  // ---- proof structure ------------------------------------------------------

  SourcePos pos_of(const Token& t) const { return SourcePos{line_->number, column(*line_, t.begin)}; }

  bool is_case_line(const RawLine& l) {
    if (l.kind != LineKind::Content) return false;
    Lexer lx(l.text, l.content);
    return lx.next().is("case");
  }

  void define_label(const std::string& label, const Token& at) {
    if (label.empty()) return;
    if (!frames_.back().labels.insert(label).second)
      error(at, "label '" + label + "' is already used in this scope", {}, ParseErrorKind::DuplicateName);
  }

  void push_frame(std::vector<Binder> eigen = {}) { frames_.push_back(Frame{std::move(eigen), {}}); }

  void pop_frame() {
    closed_labels_.insert(frames_.back().labels.begin(), frames_.back().labels.end());
    frames_.pop_back();
  }

  bool label_open(const std::string& label) const {
    if (ambient_labels_.count(label)) return true;
    return std::any_of(frames_.begin(), frames_.end(), [&](const Frame& f) { return f.labels.count(label) > 0; });
  }

  Block block(int depth) {
    Block out;
    while (cur_ < end_) {
      const RawLine& l = lines_[cur_];
      if (l.depth < depth) break;
      if (l.depth == depth + 1 && l.kind == LineKind::Content && !is_case_line(l)) {
        // An unlabelled subproof: its opening bar is the last leading bar.
        out.push_back(step(depth, true));
        continue;
      }
      if (l.depth > depth)
        error_at(l, l.content, "unexpected nesting: expected a line at depth " + std::to_string(depth),
                 {"'|' x " + std::to_string(depth)});
      if (l.kind == LineKind::Separator) error_at(l, l.content, "separator without assumptions");
      if (is_case_line(l)) error_at(l, l.content, "case outside of induction or case analysis");
      out.push_back(step(depth));
    }
    return out;
  }

  std::string optional_label(Token* at = nullptr) {
    Token t = lex_->peek();
    if ((t.kind == Tok::Ident || t.kind == Tok::Number) && lex_->peek2().kind == Tok::Colon) {
      lex_->next();
      lex_->next();
      if (at) *at = t;
      return t.text;
    }
    return {};
  }

  Step step(int depth, bool implicit_open = false) {
    const RawLine& l = lines_[cur_];
    start_line(l);
    Token label_tok = lex_->peek();
    std::string label = implicit_open ? std::string() : optional_label(&label_tok);
    Token head = lex_->peek();

    if (implicit_open || head.kind == Tok::Bar) {
      if (!implicit_open) lex_->next();
      Subproof sp;
      sp.label = label;
      sp.pos = pos_of(label.empty() ? head : label_tok);
      push_frame();
      sp.assumptions.push_back(assumption());
      ++cur_;
      while (cur_ < end_ && lines_[cur_].depth == depth + 1 && lines_[cur_].kind == LineKind::Content) {
        start_line(lines_[cur_]);
        sp.assumptions.push_back(assumption());
        ++cur_;
      }
      separator(depth + 1);
      sp.body = block(depth + 1);
      if (sp.body.empty()) {
        const RawLine& at = lines_[std::min(cur_, end_ - 1)];
        error_at(at, at.content, "subproof has no steps", {"proof line"});
      }
      pop_frame();
      start_line(l);
      define_label(label, label_tok);
      return Step{std::move(sp)};
    }

    Line line;
    line.label = label;
    line.pos = pos_of(label.empty() ? head : label_tok);
    if (head.is("prove")) {
      lex_->next();
      line.formula = formula();
      expect_end();
      line.just.kind = JustKind::Prove;
      ++cur_;
      define_label(label, label_tok);
      return Step{std::move(line)};
    }
    line.formula = formula();
    Token by = lex_->next();
    if (!by.is("by")) unexpected(by, {"by", "a connective"});
    justification(line.just);
    ++cur_;
    if (line.just.kind == JustKind::Induction || line.just.kind == JustKind::CaseAnalysis) {
      cases(depth, line.just);
      start_line(l);
    }
    define_label(label, label_tok);
    return Step{std::move(line)};
  }

  void separator(int depth) {
    if (cur_ >= end_ || lines_[cur_].depth != depth || lines_[cur_].kind != LineKind::Separator) {
      const RawLine& at = lines_[std::min(cur_, end_ - 1)];
      std::string bars(static_cast<std::size_t>(depth), '|');
      error_at(at, cur_ < end_ ? at.content : at.text.size(),
               "expected the assumption separator '" + bars + "---'", {bars + "---"});
    }
    ++cur_;
  }

  Assumption assumption() {
    Assumption a;
    Token first = lex_->peek();
    a.pos = pos_of(first);
    if (first.is("for") && lex_->peek2().is("any")) {
      lex_->next();
      lex_->next();
      a.kind = AssumptionKind::ForAny;
      a.vars = binder_groups();
      expect_end();
      add_eigen(a.vars);
      return a;
    }
    std::size_t start = lex_->offset();
    std::size_t for_some = find_for_some();
    if (for_some != std::string::npos) {
      lex_->seek(for_some);
      lex_->next();
      lex_->next();
      a.kind = AssumptionKind::ForSome;
      a.vars = binder_groups();
      expect_end();
      add_eigen(a.vars);
      lex_->seek(start);
    }
    Token label_tok;
    a.label = optional_label(&label_tok);
    a.formula = formula();
    if (for_some != std::string::npos) {
      Token t = lex_->peek();
      if (t.begin != for_some) unexpected(t, {"for some"});
    } else {
      expect_end();
    }
    define_label(a.label, label_tok);
    return a;
  }

  std::size_t find_for_some() {
    std::size_t saved = lex_->offset();
    std::size_t found = std::string::npos;
    int parens = 0;
    for (Token t = lex_->next(); t.kind != Tok::End; t = lex_->next()) {
      if (t.kind == Tok::LParen) ++parens;
      if (t.kind == Tok::RParen) --parens;
      if (parens == 0 && t.is("for") && lex_->peek().is("some")) found = t.begin;
    }
    lex_->seek(saved);
    return found;
  }

  void add_eigen(const std::vector<Binder>& vars) {
    auto& e = frames_.back().eigen;
    e.insert(e.end(), vars.begin(), vars.end());
  }

  Ref ref() {
    Token t = lex_->next();
    if (t.kind != Tok::Ident && t.kind != Tok::Number) unexpected(t, {"label"});
    if (!label_open(t.text) && closed_labels_.count(t.text))
      error(t, "label '" + t.text + "' belongs to a closed subproof and is not visible here");
    return Ref{t.text, pos_of(t)};
  }

  void refs(Justification& j) {
    if (!lex_->peek().is("on")) return;
    lex_->next();
    for (;;) {
      j.refs.push_back(ref());
      if (lex_->peek().kind != Tok::Comma) break;
      lex_->next();
    }
  }

  void justification(Justification& j) {
    Token kind = lex_->next();
    if (kind.is("rule")) {
      Token w = lex_->word();
      if (w.kind == Tok::End) unexpected(w, {"rule name"});
      if (auto b = builtin_from_name(w.text)) {
        j.kind = JustKind::BuiltIn;
        j.builtin = *b;
      } else {
        lex_->seek(w.begin);
        Token name = lex_->next();
        if (name.kind != Tok::Ident) unexpected(name, {"rule name"});
        j.kind = JustKind::Rule;
        j.name = name.text;
      }
      refs(j);
      expect_end();
    } else if (kind.is("theorem")) {
      j.kind = JustKind::Theorem;
      j.name = expect(Tok::Ident).text;
      refs(j);
      expect_end();
    } else if (kind.is("induction")) {
      j.kind = JustKind::Induction;
      expect(Tok::Colon);
      expect_end();
    } else if (kind.is("case")) {
      j.kind = JustKind::CaseAnalysis;
      expect_word("analysis");
      expect_word("on");
      Token t = lex_->peek();
      bool single = t.kind == Tok::Ident && lex_->peek2().kind == Tok::Colon;
      if (t.kind == Tok::Number || (single && !resolves_as_term(t.text))) {
        j.fact = ref();
      } else {
        j.scrutinee = term();
      }
      expect(Tok::Colon);
      expect_end();
    } else {
      unexpected(kind, {"rule", "theorem", "induction", "case analysis"});
    }
  }

  bool resolves_as_term(const std::string& name) const {
    for (const auto& f : frames_)
      for (const auto& b : f.eigen)
        if (b.name == name) return true;
    const ConstructorSig* c = sig_.find_constructor(name);
    return c && c->arity() == 0;
  }

  void cases(int depth, Justification& j) {
    while (cur_ < end_ && lines_[cur_].depth == depth && is_case_line(lines_[cur_])) {
      const RawLine& l = lines_[cur_];
      start_line(l);
      Case c;
      c.pos = pos_of(lex_->next());
      std::vector<Binder> vars;
      if (lex_->peek().is("rule")) {
        lex_->next();
        c.by_rule = true;
        c.name = expect(Tok::Ident).text;
        if (lex_->peek().kind == Tok::LParen) c.vars = binder_groups();
      } else {
        Token ctor = expect(Tok::Ident);
        const ConstructorSig* sig = sig_.find_constructor(ctor.text);
        if (!sig) error(ctor, "unknown constructor '" + ctor.text + "'", {}, ParseErrorKind::UnknownIdentifier);
        c.name = ctor.text;
        if (lex_->peek().kind == Tok::LParen) {
          lex_->next();
          for (;;) {
            Token v = expect(Tok::Ident);
            if (c.vars.size() >= sig->arity())
              error(v, "constructor '" + c.name + "' takes " + std::to_string(sig->arity()) + " argument(s)");
            c.vars.push_back(Binder{v.text, sig->arg_sorts[c.vars.size()]});
            Token sep = lex_->next();
            if (sep.kind == Tok::RParen) break;
            if (sep.kind != Tok::Comma) unexpected(sep, {"','", "')'"});
          }
        }
        if (c.vars.size() != sig->arity())
          error(ctor, "constructor '" + c.name + "' takes " + std::to_string(sig->arity()) + " argument(s)");
      }
      expect(Tok::Arrow);
      expect_end();
      ++cur_;
      push_frame(c.vars);
      while (cur_ < end_ && lines_[cur_].depth == depth + 1 && lines_[cur_].kind == LineKind::Content) {
        start_line(lines_[cur_]);
        Hypothesis h;
        Token first = lex_->peek();
        h.pos = pos_of(first);
        Token label_tok = first;
        h.label = optional_label(&label_tok);
        h.formula = formula();
        expect_end();
        define_label(h.label, label_tok);
        c.hypotheses.push_back(std::move(h));
        ++cur_;
      }
      separator(depth + 1);
      c.body = block(depth + 1);
      if (c.body.empty()) {
        const RawLine& at = lines_[std::min(cur_, end_ - 1)];
        error_at(at, at.content, "case has no steps", {"proof line"});
      }
      pop_frame();
      j.cases.push_back(std::move(c));
    }
    if (j.cases.empty()) {
      const RawLine& at = lines_[std::min(cur_, end_ - 1)];
      error_at(at, cur_ < end_ ? at.content : at.text.size(), "expected at least one case", {"case"});
    }
  }

  // ---- formulas and terms ---------------------------------------------------

  Formula formula() { return implication(); }

  Formula implication() {
    Formula lhs = disjunction();
    if (lex_->peek().kind == Tok::Implies) {
      lex_->next();
      return Formula::implies(std::move(lhs), implication());
    }
    return lhs;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (lex_->peek().kind == Tok::Or) {
      lex_->next();
      f = Formula::disj(std::move(f), conjunction());
    }
    return f;
  }

  Formula conjunction() {
    Formula f = unary();
    while (lex_->peek().kind == Tok::And) {
      lex_->next();
      f = Formula::conj(std::move(f), unary());
    }
    return f;
  }

  Formula unary() {
    if (lex_->peek().kind == Tok::Not) {
      lex_->next();
      return Formula::negate(unary());
    }
    return primary();
  }

  Formula primary() {
    Token t = lex_->next();
    switch (t.kind) {
      case Tok::LParen: {
        Formula f = formula();
        expect(Tok::RParen);
        return f;
      }
      case Tok::Bottom:
        return Formula::bottom();
      case Tok::Forall:
      case Tok::Exists: {
        std::vector<Binder> groups = binder_groups();
        expect(Tok::Colon);
        bound_.insert(bound_.end(), groups.begin(), groups.end());
        Formula body = formula();
        bound_.resize(bound_.size() - groups.size());
        for (auto it = groups.rbegin(); it != groups.rend(); ++it)
          body = t.kind == Tok::Forall ? Formula::forall(it->name, it->sort, std::move(body))
                                       : Formula::exists(it->name, it->sort, std::move(body));
        return body;
      }
      case Tok::Ident:
        return atom(t);
      default:
        unexpected(t, {"formula"});
    }
  }

  Formula atom(const Token& name) {
    bool has_args = lex_->peek().kind == Tok::LParen;
    if (!has_args && std::find(props_.begin(), props_.end(), name.text) != props_.end())
      return Formula::prop(name.text);
    std::vector<Term> args;
    if (has_args) {
      lex_->next();
      for (;;) {
        args.push_back(term());
        Token sep = lex_->next();
        if (sep.kind == Tok::RParen) break;
        if (sep.kind != Tok::Comma) unexpected(sep, {"','", "')'"});
      }
    }
    std::vector<std::string> sorts;
    for (const auto& a : args) sorts.push_back(a.sort);
    if (!sig_.declare_predicate(name.text, sorts)) {
      const auto* known = sig_.predicate(name.text);
      std::string shape = name.text + "(";
      for (std::size_t i = 0; i < known->size(); ++i) shape += (i ? ", " : "") + (*known)[i];
      error(name, "predicate '" + name.text + "' is used as " + shape + ")", {shape + ")"});
    }
    return Formula::pred(name.text, std::move(args));
  }

  Term term() {
    Token t = lex_->next();
    if (t.kind != Tok::Ident) unexpected(t, {"term"});
    if (lex_->peek().kind == Tok::LParen) {
      const ConstructorSig* sig = sig_.find_constructor(t.text);
      if (!sig) error(t, "unknown constructor '" + t.text + "'", {}, ParseErrorKind::UnknownIdentifier);
      lex_->next();
      std::vector<Term> args;
      for (;;) {
        Token at = lex_->peek();
        Term a = term();
        if (args.size() < sig->arity() && a.sort != sig->arg_sorts[args.size()])
          error(at, "expected a term of sort " + sig->arg_sorts[args.size()] + ", found " + a.sort);
        args.push_back(std::move(a));
        Token sep = lex_->next();
        if (sep.kind == Tok::RParen) break;
        if (sep.kind != Tok::Comma) unexpected(sep, {"','", "')'"});
      }
      if (args.size() != sig->arity())
        error(t, "constructor '" + t.text + "' takes " + std::to_string(sig->arity()) + " argument(s)");
      return Term::ctor(t.text, *sig_.constructor_sort(t.text), std::move(args));
    }
    for (auto it = bound_.rbegin(); it != bound_.rend(); ++it)
      if (it->name == t.text) return Term::rigid(it->name, it->sort);
    for (auto f = frames_.rbegin(); f != frames_.rend(); ++f)
      for (auto it = f->eigen.rbegin(); it != f->eigen.rend(); ++it)
        if (it->name == t.text) return Term::rigid(it->name, it->sort);
    for (const auto& s : schematics_)
      if (s.name == t.text) return Term::schematic(s.name, s.sort);
    if (const ConstructorSig* sig = sig_.find_constructor(t.text)) {
      if (sig->arity() != 0)
        error(t, "constructor '" + t.text + "' takes " + std::to_string(sig->arity()) + " argument(s)", {"'('"});
      return Term::ctor(t.text, *sig_.constructor_sort(t.text));
    }
    error(t, "unknown identifier '" + t.text + "'", {}, ParseErrorKind::UnknownIdentifier);
  }

  std::vector<RawLine> lines_;
  Signature sig_;
  std::size_t cur_ = 0;
  std::size_t end_ = 0;
  const RawLine* line_ = nullptr;
  Lexer* lex_ = nullptr;
  std::vector<std::unique_ptr<Lexer>> lexer_store_;

  std::set<std::string> names_;
  std::vector<Binder> schematics_;
  std::vector<std::string> props_;
  std::vector<Binder> bound_;
  std::vector<Frame> frames_;
  std::set<std::string> closed_labels_;
  std::set<std::string> ambient_labels_;
};

}  // namespace

ParseError::ParseError(ParseErrorKind kind, int line, int column, std::string message,
                       std::vector<std::string> expected)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      kind_(kind),
      line_(line),
      column_(column),
      message_(std::move(message)),
      expected_(std::move(expected)) {}

std::string_view to_string(ParseErrorKind k) {
  switch (k) {
    case ParseErrorKind::Syntax: return "ParseError";
    case ParseErrorKind::DuplicateName: return "DuplicateName";
    case ParseErrorKind::UnknownIdentifier: return "UnknownIdentifier";
  }
  return "?";
}

ModuleAST parse_module(std::string_view text) { return Parser(split_lines(text), Signature{}).module(); }

Block parse_fragment(std::string_view text, const Signature& sig, const FragmentScope& scope) {
  return Parser(split_lines(text), sig).fragment(scope);
}

Formula parse_formula(std::string_view text, const Signature& sig, const std::vector<Binder>& eigenvariables) {
  std::string flat(text);
  std::replace(flat.begin(), flat.end(), '\n', ' ');
  auto lines = split_lines(flat);
  for (auto& l : lines) {
    l.content = 0;
    l.depth = 0;
    l.kind = LineKind::Content;
  }
  return Parser(std::move(lines), sig).formula_only(eigenvariables);
}

}  // namespace fitchmi
