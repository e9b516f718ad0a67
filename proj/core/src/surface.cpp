#include "wlt/surface.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

namespace wlt {

ParseError::ParseError(const std::string& message, Span w, std::vector<std::string> exp)
    : std::runtime_error(std::to_string(w.line) + ":" + std::to_string(w.column) + ": " + message +
                         [&] {
                           if (exp.empty()) return std::string();
                           std::string s = " (expected ";
                           for (std::size_t i = 0; i < exp.size(); ++i)
                             s += (i ? ", " : "") + exp[i];
                           return s + ")";
                         }()),
      where(w),
      detail(message),
      expected(std::move(exp)) {}

const StoreDecl* ProgramFile::find(std::string_view name) const {
  for (const auto& d : store)
    if (d.name == name) return &d;
  return nullptr;
}

bool is_reserved_name(std::string_view name) {
  if (name.size() < 2 || name[0] != 'v') return false;
  return std::all_of(name.begin() + 1, name.end(),
                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

namespace {

enum class Tok { Ident, Int, Sym, Name, End };

struct Token {
  Tok kind;
  std::string text;
  Span span;
};

const std::set<std::string, std::less<>> kKeywords = {
    "spl", "as",  "in",  "if",    "then", "else", "let",  "case", "of",
    "li",  "un",  "hi",  "true",  "false", "int", "bool", "array"};

const std::set<std::string, std::less<>> kCompare = {"=", "==", "!=", "<", "<=", ">", ">="};
const std::set<std::string, std::less<>> kAdditive = {"+", "-"};
const std::set<std::string, std::less<>> kMultiplicative = {"*", "/", "%"};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(std::string_view src, int first_line) {
  static const std::vector<std::string_view> symbols = {
      ".[<-]", ".[]", "->", "<-", "<=", ">=", "==", "!=", "..", "λ", "≡", "⟨", "⟩",
      "(",     ")",   "<",  ">",  ",",  "[",  "]",  "{",  "}",  ":", ".", "\\", "=",
      "+",     "-",   "*",  "/",  "%",  "@",  ";"};
  std::vector<Token> out;
  int line = first_line;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Span sp{line, col};
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && is_ident_char(src[j])) ++j;
      std::string word(src.substr(i, j - i));
      advance(j - i);
      out.push_back({Tok::Ident, std::move(word), sp});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      std::string digits(src.substr(i, j - i));
      advance(j - i);
      out.push_back({Tok::Int, std::move(digits), sp});
      continue;
    }
    if (c == '`') {
      std::size_t j = src.find('`', i + 1);
      if (j == std::string_view::npos) throw ParseError("unterminated quoted operator name", sp);
      std::string name(src.substr(i + 1, j - i - 1));
      advance(j - i + 1);
      out.push_back({Tok::Name, std::move(name), sp});
      continue;
    }
    bool matched = false;
    for (auto s : symbols) {
      if (src.substr(i, s.size()) == s) {
        std::string text(s);
        if (text == "λ") text = "\\";
        if (text == "≡") text = "=";
        if (text == "⟨") text = "<";
        if (text == "⟩") text = ">";
        advance(s.size());
        out.push_back({Tok::Sym, std::move(text), sp});
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", sp);
  }
  out.push_back({Tok::End, "", Span{line, col}});
  return out;
}

class Parser {
 public:
  Parser(std::vector<Token> toks, const QualifiedSignature* sig,
         const std::map<std::string, std::int64_t>* params)
      : toks_(std::move(toks)), sig_(sig), params_(params) {}

  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Tok::End; }
  Token take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  bool is_sym(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Sym && peek(k).text == s;
  }
  bool is_word(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).text == s;
  }

  [[noreturn]] void fail(const std::string& what, std::vector<std::string> expected = {}) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(what + ", found " + found, t.span, std::move(expected));
  }

  void expect_sym(std::string_view s) {
    if (!is_sym(s)) fail("unexpected token", {"'" + std::string(s) + "'"});
    take();
  }
  void expect_word(std::string_view s) {
    if (!is_word(s)) fail("unexpected token", {"'" + std::string(s) + "'"});
    take();
  }

  std::string identifier(const char* role) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || kKeywords.count(t.text)) fail(std::string("expected ") + role, {role});
    if (is_reserved_name(t.text))
      throw ParseError("name '" + t.text + "' is reserved for machine cells", t.span);
    return take().text;
  }

  void expect_end() {
    if (!at_end()) fail("unexpected trailing input", {"end of input"});
  }

  // -- qualifiers and types -------------------------------------------------

  bool at_qualifier() const { return is_word("li") || is_word("un"); }

  Qualifier qualifier() {
    if (is_word("li")) {
      take();
      return Qualifier::Li;
    }
    if (is_word("un")) {
      take();
      return Qualifier::Un;
    }
    if (is_word("hi")) fail("hi is only allowed in signature input positions", {"li", "un"});
    fail("expected a qualifier", {"li", "un"});
  }

  Type type() {
    if (is_sym("(")) {
      take();
      Type t = type();
      expect_sym(")");
      return t;
    }
    Qualifier q = qualifier();
    return Type{q, pretype()};
  }

  PretypePtr pretype() {
    if (is_word("int")) {
      take();
      return types::int_();
    }
    if (is_word("bool")) {
      take();
      return types::bool_();
    }
    if (is_word("array")) {
      take();
      return types::array();
    }
    if (is_word("list")) {
      take();
      return Pretype::list(type());
    }
    if (is_sym("<")) {
      take();
      std::vector<Type> items{type()};
      while (is_sym(",")) {
        take();
        items.push_back(type());
      }
      expect_sym(">");
      return Pretype::tuple(std::move(items));
    }
    if (is_sym("(")) {
      take();
      Type from = type();
      expect_sym("->");
      Type to = type();
      expect_sym(")");
      return Pretype::arrow(std::move(from), std::move(to));
    }
    if (peek().kind == Tok::Ident && !kKeywords.count(peek().text))
      return Pretype::base(take().text);
    fail("expected a pretype", {"int", "bool", "array", "list", "<", "("});
  }

  PseudoType pseudotype() {
    if (is_word("hi")) {
      Span sp = take().span;
      PretypePtr p = pretype();
      if (!p->is_base()) throw ParseError("hi applies only to base pretypes", sp);
      return PseudoType::hidden(p);
    }
    return PseudoType::proper(type());
  }

  // -- constants ------------------------------------------------------------

  std::int64_t int_atom() {
    bool neg = false;
    if (is_sym("-")) {
      take();
      neg = true;
    }
    std::int64_t v = 0;
    if (peek().kind == Tok::Int) {
      v = std::stoll(take().text);
    } else if (peek().kind == Tok::Ident && params_ && params_->count(peek().text)) {
      v = params_->at(take().text);
      if ((is_sym("-") || is_sym("+")) && peek(1).kind == Tok::Int) {
        bool minus = take().text == "-";
        std::int64_t k = std::stoll(take().text);
        v = minus ? v - k : v + k;
      }
    } else {
      fail("expected an integer constant", {"integer", "parameter"});
    }
    return neg ? -v : v;
  }

  bool at_int_atom() const {
    if (peek().kind == Tok::Int) return true;
    if (is_sym("-") && peek(1).kind == Tok::Int) return true;
    return peek().kind == Tok::Ident && params_ && params_->count(peek().text) &&
           !scoped(peek().text);
  }

  std::vector<std::int64_t> array_literal() {
    expect_sym("{");
    std::vector<std::int64_t> out;
    if (is_sym("}")) {
      take();
      return out;
    }
    std::int64_t first = int_atom();
    if (is_sym("..")) {
      take();
      std::int64_t last = int_atom();
      expect_sym("}");
      std::int64_t step = first <= last ? 1 : -1;
      for (std::int64_t k = first;; k += step) {
        out.push_back(k);
        if (k == last) break;
      }
      return out;
    }
    out.push_back(first);
    while (is_sym(",")) {
      take();
      out.push_back(int_atom());
    }
    expect_sym("}");
    return out;
  }

  // -- scopes ----------------------------------------------------------------

  bool scoped(const std::string& x) const {
    return std::find(scope_.begin(), scope_.end(), x) != scope_.end();
  }

  struct ScopeGuard {
    Parser& p;
    std::size_t mark;
    ~ScopeGuard() { p.scope_.resize(mark); }
  };
  ScopeGuard bind(const std::vector<std::string>& names) {
    ScopeGuard g{*this, scope_.size()};
    scope_.insert(scope_.end(), names.begin(), names.end());
    return g;
  }

  std::vector<std::string> scope_;

  // -- expressions -----------------------------------------------------------

  std::optional<std::size_t> entry_annotation() {
    if (!is_sym("@")) return std::nullopt;
    take();
    if (peek().kind != Tok::Int) fail("expected an entry number after '@'", {"integer"});
    Span sp = peek().span;
    long k = std::stol(take().text);
    if (k < 1 || !sig_ || static_cast<std::size_t>(k) > sig_->entries().size())
      throw ParseError("signature entry @" + std::to_string(k) + " does not exist", sp);
    return static_cast<std::size_t>(k - 1);
  }

  ExprPtr make_op(std::string name, std::optional<std::size_t> entry, std::vector<ExprPtr> args,
                  Span sp) {
    if (entry) {
      const auto& e = sig_->entries()[*entry];
      if (e.name != name || e.type.inputs.size() != args.size())
        throw ParseError("signature entry @" + std::to_string(*entry + 1) + " is '" + e.name +
                             "' with " + std::to_string(e.type.inputs.size()) + " inputs",
                         sp);
      return op(std::move(name), *entry, e.type, std::move(args), sp);
    }
    return op(std::move(name), std::move(args), sp);
  }

  ExprPtr expr() {
    Span sp = peek().span;
    if (is_word("spl")) {
      take();
      ExprPtr scrut = expr();
      expect_word("as");
      expect_sym("<");
      std::vector<std::string> pat{identifier("pattern variable")};
      while (is_sym(",")) {
        take();
        pat.push_back(identifier("pattern variable"));
      }
      expect_sym(">");
      for (std::size_t i = 0; i < pat.size(); ++i)
        for (std::size_t j = i + 1; j < pat.size(); ++j)
          if (pat[i] == pat[j])
            throw ParseError("pattern variable '" + pat[i] + "' repeated", sp);
      expect_word("in");
      auto g = bind(pat);
      ExprPtr body = expr();
      return make(node::Split{scrut, pat, body}, sp);
    }
    if (is_word("if")) {
      take();
      ExprPtr c = expr();
      expect_word("then");
      ExprPtr t = expr();
      expect_word("else");
      ExprPtr e = expr();
      return make(node::If{c, t, e}, sp);
    }
    if (is_word("let")) {
      take();
      std::string x = identifier("variable");
      std::optional<Type> annot;
      if (is_sym(":")) {
        take();
        annot = type();
      }
      expect_sym("=");
      ExprPtr bound = expr();
      expect_word("in");
      auto g = bind({x});
      ExprPtr body = expr();
      return make(node::Let{x, annot, bound, body}, sp);
    }
    if (is_word("case")) {
      take();
      ExprPtr scrut = expr();
      expect_word("of");
      expect_sym("(");
      ExprPtr nil_branch = expr();
      expect_sym(",");
      expect_sym("(");
      std::string h = identifier("variable");
      expect_sym(":");
      std::string t = identifier("variable");
      if (h == t) throw ParseError("case binds '" + h + "' twice", sp);
      expect_sym(")");
      expect_sym("->");
      auto g = bind({h, t});
      ExprPtr cons_branch = expr();
      expect_sym(")");
      return make(node::Case{scrut, nil_branch, h, t, cons_branch}, sp);
    }
    return comparison(true);
  }

  ExprPtr comparison(bool allow) {
    ExprPtr lhs = additive();
    if (allow && peek().kind == Tok::Sym && kCompare.count(peek().text)) {
      Token t = take();
      auto entry = entry_annotation();
      ExprPtr rhs = additive();
      return make_op(t.text, entry, {lhs, rhs}, t.span);
    }
    return lhs;
  }

  ExprPtr additive() {
    ExprPtr lhs = multiplicative();
    while (peek().kind == Tok::Sym && kAdditive.count(peek().text)) {
      Token t = take();
      auto entry = entry_annotation();
      ExprPtr rhs = multiplicative();
      lhs = make_op(t.text, entry, {lhs, rhs}, t.span);
    }
    return lhs;
  }

  ExprPtr multiplicative() {
    ExprPtr lhs = application();
    while (peek().kind == Tok::Sym && kMultiplicative.count(peek().text)) {
      Token t = take();
      auto entry = entry_annotation();
      ExprPtr rhs = application();
      lhs = make_op(t.text, entry, {lhs, rhs}, t.span);
    }
    return lhs;
  }

  bool at_atom() const {
    const Token& t = peek();
    if (t.kind == Tok::Name) return true;
    if (t.kind == Tok::Ident) {
      if (t.text == "li" || t.text == "un" || t.text == "hi") return true;
      return !kKeywords.count(t.text);
    }
    return t.kind == Tok::Sym && (t.text == "(" || t.text == "\\");
  }

  ExprPtr application() {
    ExprPtr fn = postfix();
    while (at_atom()) {
      Span sp = peek().span;
      ExprPtr arg = postfix();
      fn = make(node::App{fn, arg}, sp);
    }
    return fn;
  }

  ExprPtr postfix() {
    ExprPtr e = atom();
    while (is_sym("[")) {
      Span sp = take().span;
      ExprPtr index = comparison(true);
      if (is_sym("<-")) {
        take();
        ExprPtr value = expr();
        expect_sym("]");
        auto entry = entry_annotation();
        e = make_op(".[<-]", entry, {e, index, value}, sp);
      } else {
        expect_sym("]");
        auto entry = entry_annotation();
        e = make_op(".[]", entry, {e, index}, sp);
      }
    }
    return e;
  }

  std::vector<ExprPtr> call_args() {
    expect_sym("(");
    std::vector<ExprPtr> args;
    if (is_sym(")")) {
      take();
      return args;
    }
    args.push_back(expr());
    while (is_sym(",")) {
      take();
      args.push_back(expr());
    }
    expect_sym(")");
    return args;
  }

  ExprPtr atom() {
    Span sp = peek().span;
    if (is_word("hi")) fail("hi is not a value qualifier", {"li", "un"});
    if (at_qualifier()) return qualified(qualifier(), sp);
    if (peek().kind == Tok::Name) {
      std::string name = take().text;
      auto entry = entry_annotation();
      return make_op(name, entry, call_args(), sp);
    }
    if (is_sym("\\")) fail("a lambda needs a qualifier", {"li", "un"});
    if (is_sym("(")) {
      take();
      ExprPtr e = expr();
      expect_sym(")");
      return e;
    }
    if (peek().kind == Tok::Ident && !kKeywords.count(peek().text)) {
      const std::string& name = peek().text;
      bool is_operator = sig_ && sig_->has_operator(name) && !scoped(name);
      if (is_operator && (is_sym("(", 1) || is_sym("@", 1))) {
        take();
        auto entry = entry_annotation();
        return make_op(name, entry, call_args(), sp);
      }
      std::string x = identifier("variable");
      if (!scoped(x)) throw ParseError("unbound variable '" + x + "'", sp);
      return var(x, sp);
    }
    fail("expected an expression");
  }

  ExprPtr qualified(Qualifier q, Span sp) {
    if (is_word("true") || is_word("false")) return literal(q, take().text == "true", sp);
    if (is_sym("{")) return literal(q, array_literal(), sp);
    if (at_int_atom()) return literal(q, int_atom(), sp);
    if (is_sym("\\")) {
      take();
      std::string x = identifier("parameter");
      expect_sym(":");
      Type t = type();
      expect_sym(".");
      auto g = bind({x});
      ExprPtr body = expr();
      return make(node::Lambda{q, x, t, body}, sp);
    }
    if (is_sym("<")) {
      take();
      std::vector<ExprPtr> items{comparison(false)};
      while (is_sym(",")) {
        take();
        items.push_back(comparison(false));
      }
      expect_sym(">");
      return make(node::Tuple{q, std::move(items)}, sp);
    }
    if (is_sym("[")) {
      take();
      expect_sym("]");
      return make(node::Nil{q}, sp);
    }
    if (is_sym("(")) {
      take();
      ExprPtr head = expr();
      expect_sym(":");
      ExprPtr tail = expr();
      expect_sym(")");
      return make(node::Cons{q, head, tail}, sp);
    }
    fail("expected a value after the qualifier",
         {"integer", "true", "false", "{", "\\", "<", "[]", "("});
  }

  // -- signature entries -----------------------------------------------------

  SignatureEntry signature_entry() {
    std::string name;
    const Token& t = peek();
    if (t.kind == Tok::Name || (t.kind == Tok::Ident && !kKeywords.count(t.text))) {
      name = take().text;
    } else if (t.kind == Tok::Sym &&
               (kCompare.count(t.text) || kAdditive.count(t.text) ||
                kMultiplicative.count(t.text) || t.text == ".[]" || t.text == ".[<-]")) {
      name = take().text;
    } else {
      fail("expected an operator name");
    }
    expect_sym(":");
    expect_sym("(");
    std::vector<PseudoType> inputs;
    if (!is_sym(")")) {
      inputs.push_back(pseudotype());
      while (is_sym(",")) {
        take();
        inputs.push_back(pseudotype());
      }
    }
    expect_sym(")");
    expect_sym("->");
    if (is_word("hi")) fail("an operator result cannot be hidden", {"li", "un"});
    Type out = type();
    expect_sym("=");
    if (peek().kind != Tok::Ident) fail("expected a primitive key", {"identifier"});
    std::string key = take().text;
    return SignatureEntry{std::move(name), OperatorType{std::move(inputs), std::move(out)},
                          std::move(key)};
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const QualifiedSignature* sig_;
  const std::map<std::string, std::int64_t>* params_;
};

struct Section {
  std::string name;
  int first_line;
  std::vector<std::pair<int, std::string>> lines;
};

std::vector<Section> split_sections(std::string_view text) {
  static const std::set<std::string, std::less<>> headers = {"signature", "store", "main",
                                                             "params"};
  std::vector<Section> out;
  int lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(start, end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++lineno;
    std::string trimmed = line;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back())))
      trimmed.pop_back();
    if (!line.empty() && !std::isspace(static_cast<unsigned char>(line[0])) &&
        trimmed.size() > 1 && trimmed.back() == ':' &&
        headers.count(std::string_view(trimmed).substr(0, trimmed.size() - 1))) {
      std::string name = trimmed.substr(0, trimmed.size() - 1);
      for (const auto& s : out)
        if (s.name == name) throw ParseError("section '" + name + "' repeated", Span{lineno, 1});
      out.push_back(Section{name, lineno + 1, {}});
    } else if (out.empty()) {
      std::string probe = trimmed;
      auto hash = probe.find('#');
      if (hash != std::string::npos) probe.resize(hash);
      if (probe.find_first_not_of(" \t") != std::string::npos)
        throw ParseError("text before the first section header", Span{lineno, 1},
                         {"signature:", "store:", "main:", "params:"});
    } else {
      out.back().lines.emplace_back(lineno, line);
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

std::string join_lines(const std::vector<std::pair<int, std::string>>& lines, std::size_t from,
                       std::size_t to) {
  std::string s;
  for (std::size_t i = from; i < to; ++i) s += lines[i].second + "\n";
  return s;
}

bool blank_or_comment(const std::string& line) {
  auto p = line.find_first_not_of(" \t");
  return p == std::string::npos || line[p] == '#' || line.compare(p, 2, "//") == 0;
}

bool is_value_expr(const ExprPtr& e) {
  if (e->is<node::Lambda>() || e->is<node::Nil>()) return true;
  if (auto o = e->as<node::Op>()) return o->literal.has_value();
  if (auto t = e->as<node::Tuple>())
    return std::all_of(t->items.begin(), t->items.end(),
                       [](const ExprPtr& i) { return i->is<node::Var>(); });
  if (auto c = e->as<node::Cons>()) return c->head->is<node::Var>() && c->tail->is<node::Var>();
  return false;
}

}  // namespace

ProgramFile parse_program(std::string_view text, const ParamOverrides& overrides) {
  auto sections = split_sections(text);
  auto find = [&](std::string_view n) -> const Section* {
    for (const auto& s : sections)
      if (s.name == n) return &s;
    return nullptr;
  };

  ProgramFile prog;
  std::map<std::string, std::int64_t> params;
  if (const Section* s = find("params")) {
    for (const auto& [lineno, line] : s->lines) {
      if (blank_or_comment(line)) continue;
      Parser p(lex(line, lineno), nullptr, nullptr);
      std::string name = p.identifier("parameter name");
      p.expect_sym("=");
      bool neg = false;
      if (p.is_sym("-")) {
        p.take();
        neg = true;
      }
      if (p.peek().kind != Tok::Int) p.fail("expected an integer", {"integer"});
      std::int64_t v = std::stoll(p.take().text);
      p.expect_end();
      if (params.count(name)) throw ParseError("parameter '" + name + "' repeated", Span{lineno, 1});
      params[name] = neg ? -v : v;
      prog.params.emplace_back(name, 0);
    }
  }
  for (const auto& [name, value] : overrides) {
    if (!params.count(name))
      throw ParseError("override for undeclared parameter '" + name + "'", Span{1, 1});
    params[name] = value;
  }
  for (auto& [name, value] : prog.params) value = params.at(name);

  if (const Section* s = find("signature")) {
    for (const auto& [lineno, line] : s->lines) {
      if (blank_or_comment(line)) continue;
      Parser p(lex(line, lineno), nullptr, nullptr);
      SignatureEntry e = p.signature_entry();
      p.expect_end();
      prog.signature.add(std::move(e));
    }
  }

  std::vector<std::string> scope;
  if (const Section* s = find("store")) {
    const auto& lines = s->lines;
    std::size_t i = 0;
    while (i < lines.size()) {
      if (blank_or_comment(lines[i].second)) {
        ++i;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(lines[i].second[0])))
        throw ParseError("store entries must start at column 1", Span{lines[i].first, 1});
      std::size_t j = i + 1;
      while (j < lines.size() &&
             (blank_or_comment(lines[j].second) ||
              std::isspace(static_cast<unsigned char>(lines[j].second[0]))))
        ++j;
      Parser p(lex(join_lines(lines, i, j), lines[i].first), &prog.signature, &params);
      Span head = p.peek().span;
      std::string name = p.identifier("store variable");
      if (prog.find(name)) throw ParseError("store variable '" + name + "' repeated", head);
      std::optional<Type> declared;
      if (p.is_sym(":")) {
        p.take();
        declared = p.type();
      }
      p.expect_sym("=");
      p.scope_ = scope;
      // Unrestricted closures may refer to themselves.
      bool self_ref = p.is_word("un") && p.is_sym("\\", 1);
      if (self_ref) p.scope_.push_back(name);
      ExprPtr value = p.expr();
      p.expect_end();
      if (!is_value_expr(value) && occurs_free(name, value))
        throw ParseError("setup entry '" + name + "' refers to itself", head);
      prog.store.push_back(StoreDecl{name, declared, value});
      scope.push_back(name);
      i = j;
    }
  }

  const Section* m = find("main");
  if (!m) throw ParseError("missing 'main:' section", Span{1, 1}, {"main:"});
  Parser p(lex(join_lines(m->lines, 0, m->lines.size()), m->first_line), &prog.signature,
           &params);
  p.scope_ = scope;
  prog.main = p.expr();
  p.expect_end();
  return prog;
}

ExprPtr parse_expression(std::string_view text, const QualifiedSignature& sig,
                         const std::vector<std::string>& scope) {
  Parser p(lex(text, 1), &sig, nullptr);
  p.scope_ = scope;
  ExprPtr e = p.expr();
  p.expect_end();
  return e;
}

Type parse_type(std::string_view text) {
  Parser p(lex(text, 1), nullptr, nullptr);
  Type t = p.type();
  p.expect_end();
  return t;
}

std::string print_signature_entry(const SignatureEntry& e) {
  bool plain = std::all_of(e.name.begin(), e.name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
  }) && !e.name.empty() && !std::isdigit(static_cast<unsigned char>(e.name[0]));
  static const std::set<std::string, std::less<>> symbolic = {
      "=", "==", "!=", "<", "<=", ">", ">=", "+", "-", "*", "/", "%", ".[]", ".[<-]"};
  std::string name = plain || symbolic.count(e.name) ? e.name : "`" + e.name + "`";
  return name + " : " + to_string(e.type) + " = " + e.primitive;
}

std::string print_program(const ProgramFile& p) {
  std::ostringstream out;
  out << "signature:\n";
  for (const auto& e : p.signature.entries()) out << print_signature_entry(e) << "\n";
  out << "store:\n";
  for (const auto& d : p.store) {
    out << d.name;
    if (d.declared) out << " : " << to_string(*d.declared);
    out << " = " << to_string(d.value) << "\n";
  }
  out << "main:\n" << to_string(p.main) << "\n";
  if (!p.params.empty()) {
    out << "params:\n";
    for (const auto& [n, v] : p.params) out << n << " = " << v << "\n";
  }
  return out.str();
}

bool structurally_equal(const ProgramFile& a, const ProgramFile& b) {
  const auto& ea = a.signature.entries();
  const auto& eb = b.signature.entries();
  if (ea.size() != eb.size()) return false;
  for (std::size_t i = 0; i < ea.size(); ++i)
    if (ea[i].name != eb[i].name || !(ea[i].type == eb[i].type) ||
        ea[i].primitive != eb[i].primitive)
      return false;
  if (a.store.size() != b.store.size()) return false;
  for (std::size_t i = 0; i < a.store.size(); ++i)
    if (a.store[i].name != b.store[i].name || a.store[i].declared != b.store[i].declared ||
        !equal(a.store[i].value, b.store[i].value))
      return false;
  return equal(a.main, b.main) && a.params == b.params;
}

}  // namespace wlt
