#include "utcc/parser.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>

#include "utcc/errors.hpp"

namespace utcc {

namespace {

enum class Tok { Ident, Number, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
  std::size_t begin;  // offset in source
  std::size_t end;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { tokenize(); }

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Tok::End; }
  std::size_t mark() const { return pos_; }
  void rewind(std::size_t m) { pos_ = m; }

  bool is_sym(const std::string& s, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::Sym && t.text == s;
  }
  bool is_kw(const std::string& s, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::Ident && t.text == s;
  }
  void expect_sym(const std::string& s) {
    if (!is_sym(s)) fail("expected '" + s + "'");
    next();
  }
  std::string expect_ident(const char* what) {
    if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
    return next().text;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(msg + " near '" + (t.kind == Tok::End ? "<end>" : t.text) + "'", t.line,
                     t.col);
  }
  std::string slice(std::size_t from_tok, std::size_t to_tok) const {
    if (from_tok >= to_tok) return "";
    std::size_t b = toks_[from_tok].begin;
    std::size_t e = toks_[to_tok - 1].end;
    return src_.substr(b, e - b);
  }

 private:
  void tokenize() {
    int line = 1, col = 1;
    std::size_t i = 0;
    auto push = [&](Tok k, std::size_t b, std::size_t e) {
      toks_.push_back({k, src_.substr(b, e - b), line, col, b, e});
    };
    while (i < src_.size()) {
      char c = src_[i];
      if (c == '\n') {
        ++line;
        col = 1;
        ++i;
        continue;
      }
      if (isspace(static_cast<unsigned char>(c))) {
        ++col;
        ++i;
        continue;
      }
      if (c == '/' && i + 1 < src_.size() && src_[i + 1] == '/') {
        while (i < src_.size() && src_[i] != '\n') ++i;
        continue;
      }
      std::size_t b = i;
      if (isalpha(static_cast<unsigned char>(c)) || c == '_') {
        while (i < src_.size() &&
               (isalnum(static_cast<unsigned char>(src_[i])) || src_[i] == '_' ||
                src_[i] == '\''))
          ++i;
        push(Tok::Ident, b, i);
        col += static_cast<int>(i - b);
        continue;
      }
      if (isdigit(static_cast<unsigned char>(c))) {
        while (i < src_.size() && isdigit(static_cast<unsigned char>(src_[i]))) ++i;
        push(Tok::Number, b, i);
        col += static_cast<int>(i - b);
        continue;
      }
      // Multi-character symbols first.
      static const char* two[] = {"||", "/\\", "\\/", "<->", nullptr};
      bool matched = false;
      for (int k = 0; two[k]; ++k) {
        std::size_t len = std::string(two[k]).size();
        if (src_.compare(i, len, two[k]) == 0) {
          i += len;
          push(Tok::Sym, b, i);
          col += static_cast<int>(len);
          matched = true;
          break;
        }
      }
      if (matched) continue;
      static const std::string singles = "()[]{}<>,;.=!|/";
      if (singles.find(c) != std::string::npos) {
        ++i;
        push(Tok::Sym, b, i);
        ++col;
        continue;
      }
      throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    toks_.push_back({Tok::End, "", line, col, src_.size(), src_.size()});
  }

  const std::string& src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

bool is_keyword(const std::string& s) {
  static const std::set<std::string> kws = {"skip", "tell",   "when", "do",   "abs",
                                            "local", "next",  "unless", "true", "false",
                                            "exists", "const", "fun",  "pred", "pool",
                                            "global"};
  return kws.count(s) > 0;
}

// --- terms -----------------------------------------------------------------

Term parse_term_rec(Lexer& lx, const Signature& sig);

TermVec parse_args_rec(Lexer& lx, const Signature& sig) {
  TermVec args;
  lx.expect_sym("(");
  if (!lx.is_sym(")")) {
    args.push_back(parse_term_rec(lx, sig));
    while (lx.is_sym(",")) {
      lx.next();
      args.push_back(parse_term_rec(lx, sig));
    }
  }
  lx.expect_sym(")");
  return args;
}

Term parse_list_rec(Lexer& lx, const Signature& sig) {
  lx.expect_sym("[");
  if (lx.is_sym("]")) {
    lx.next();
    return Term::app("nil");
  }
  TermVec items;
  items.push_back(parse_term_rec(lx, sig));
  while (lx.is_sym(",")) {
    lx.next();
    items.push_back(parse_term_rec(lx, sig));
  }
  Term tail = Term::app("nil");
  if (lx.is_sym("|")) {
    lx.next();
    tail = parse_term_rec(lx, sig);
  }
  lx.expect_sym("]");
  Term out = tail;
  for (auto it = items.rbegin(); it != items.rend(); ++it)
    out = Term::app("cons", {*it, out});
  return out;
}

Term parse_term_rec(Lexer& lx, const Signature& sig) {
  if (lx.is_sym("[")) return parse_list_rec(lx, sig);
  const Token& t = lx.peek();
  if (t.kind == Tok::Number) {
    lx.next();
    return Term::app(t.text);  // numerals are constants
  }
  if (t.kind != Tok::Ident) lx.fail("expected a term");
  std::string name = lx.next().text;
  if (lx.is_sym("(")) {
    TermVec args = parse_args_rec(lx, sig);
    check_usage(sig.is_function(name),
                "undeclared function symbol '" + name + "'");
    check_usage(sig.functions.at(name) == static_cast<int>(args.size()),
                "arity mismatch for function " + name);
    return Term::app(name, std::move(args));
  }
  if (sig.is_constant(name)) return Term::app(name);
  check_usage(!sig.is_function(name), "function symbol '" + name + "' used without arguments");
  check_usage(!sig.is_predicate(name), "predicate symbol '" + name + "' used as a term");
  return Term::var(name);
}

// --- constraints over equation systems --------------------------------------

void parse_conj_rec(Lexer& lx, const Signature& sig, RawFormula& out, const Subst& rename,
                    int& exists_counter);

void parse_formula_atom(Lexer& lx, const Signature& sig, RawFormula& out, const Subst& rename,
                        int& exists_counter) {
  if (lx.is_kw("true")) {
    lx.next();
    return;
  }
  if (lx.is_kw("false")) {
    lx.next();
    out.is_false = true;
    return;
  }
  if (lx.is_kw("exists")) {
    lx.next();
    std::vector<std::string> vars;
    vars.push_back(lx.expect_ident("variable"));
    while (lx.is_sym(",")) {
      lx.next();
      vars.push_back(lx.expect_ident("variable"));
    }
    lx.expect_sym(".");
    lx.expect_sym("(");
    Subst inner = rename;
    for (const auto& v : vars) {
      std::string nn = "_E" + std::to_string(++exists_counter);
      inner[v] = Term::var(nn);
      out.bound.push_back(nn);
    }
    parse_conj_rec(lx, sig, out, inner, exists_counter);
    lx.expect_sym(")");
    return;
  }
  // Predicate atom or equation.
  if (lx.peek().kind == Tok::Ident && sig.is_predicate(lx.peek().text) && lx.is_sym("(", 1)) {
    std::string name = lx.next().text;
    TermVec args = parse_args_rec(lx, sig);
    check_usage(sig.predicates.at(name) == static_cast<int>(args.size()),
                "arity mismatch for predicate " + name);
    PredAtom a{name, {}};
    for (const auto& t : args) a.args.push_back(t.apply(rename));
    out.preds.push_back(std::move(a));
    return;
  }
  Term lhs = parse_term_rec(lx, sig).apply(rename);
  lx.expect_sym("=");
  Term rhs = parse_term_rec(lx, sig).apply(rename);
  out.equations.emplace_back(lhs, rhs);
}

void parse_conj_rec(Lexer& lx, const Signature& sig, RawFormula& out, const Subst& rename,
                    int& exists_counter) {
  parse_formula_atom(lx, sig, out, rename, exists_counter);
  while (lx.is_sym("/\\")) {
    lx.next();
    parse_formula_atom(lx, sig, out, rename, exists_counter);
  }
}

// --- program source ----------------------------------------------------------

// Captures the raw text of a constraint, stopping at `stop` (a keyword or
// symbol) seen at bracket depth zero.
std::string capture_until(Lexer& lx, const std::string& stop, bool stop_is_kw) {
  std::size_t from = lx.mark();
  int depth = 0;
  while (!lx.at_end()) {
    if (depth == 0 && (stop_is_kw ? lx.is_kw(stop) : lx.is_sym(stop))) break;
    const Token& t = lx.peek();
    if (t.kind == Tok::Sym) {
      if (t.text == "(" || t.text == "[" || t.text == "{" ) ++depth;
      if (t.text == ")" || t.text == "]" || t.text == "}") {
        if (depth == 0) break;
        --depth;
      }
    }
    lx.next();
  }
  return lx.slice(from, lx.mark());
}

SourceProcessPtr sp(ProcKind k) {
  auto p = std::make_shared<SourceProcess>();
  p->kind = k;
  return p;
}

SourceProcessPtr parse_process(Lexer& lx);
std::string capture_arg(Lexer& lx);

SourceProcessPtr parse_prefix(Lexer& lx) {
  if (lx.is_kw("skip")) {
    lx.next();
    return sp(ProcKind::Skip);
  }
  if (lx.is_kw("tell")) {
    lx.next();
    lx.expect_sym("(");
    auto p = sp(ProcKind::Tell);
    p->constraint_text = capture_until(lx, ")", false);
    lx.expect_sym(")");
    return p;
  }
  if (lx.is_kw("when")) {
    lx.next();
    auto p = sp(ProcKind::Abs);
    p->constraint_text = capture_until(lx, "do", true);
    if (!lx.is_kw("do")) lx.fail("expected 'do'");
    lx.next();
    p->children.push_back(parse_prefix(lx));
    return p;
  }
  if (lx.is_kw("abs")) {
    lx.next();
    lx.expect_sym("(");
    auto p = sp(ProcKind::Abs);
    p->binders.push_back(lx.expect_ident("binder variable"));
    while (lx.is_sym(",")) {
      lx.next();
      p->binders.push_back(lx.expect_ident("binder variable"));
    }
    lx.expect_sym(";");
    p->constraint_text = capture_until(lx, ")", false);
    lx.expect_sym(")");
    if (!lx.is_kw("do")) lx.fail("expected 'do'");
    lx.next();
    p->children.push_back(parse_prefix(lx));
    return p;
  }
  if (lx.is_kw("local")) {
    lx.next();
    auto p = sp(ProcKind::Local);
    p->binders.push_back(lx.expect_ident("local variable"));
    while (lx.is_sym(",")) {
      lx.next();
      p->binders.push_back(lx.expect_ident("local variable"));
    }
    lx.expect_sym(".");
    lx.expect_sym("(");
    p->children.push_back(parse_process(lx));
    lx.expect_sym(")");
    return p;
  }
  if (lx.is_kw("next")) {
    lx.next();
    auto p = sp(ProcKind::Next);
    p->children.push_back(parse_prefix(lx));
    return p;
  }
  if (lx.is_kw("unless")) {
    lx.next();
    auto p = sp(ProcKind::Unless);
    p->constraint_text = capture_until(lx, "next", true);
    if (!lx.is_kw("next")) lx.fail("expected 'next'");
    lx.next();
    p->children.push_back(parse_prefix(lx));
    return p;
  }
  if (lx.is_sym("!")) {
    lx.next();
    auto p = parse_prefix(lx);
    auto b = sp(p->kind);
    *b = *p;
    b->bang = true;
    return b;
  }
  if (lx.is_sym("(")) {
    lx.next();
    auto p = parse_process(lx);
    lx.expect_sym(")");
    return p;
  }
  if (lx.peek().kind == Tok::Ident && !is_keyword(lx.peek().text)) {
    auto p = sp(ProcKind::Call);
    p->callee = lx.next().text;
    lx.expect_sym("(");
    if (!lx.is_sym(")")) {
      p->arg_texts.push_back(capture_arg(lx));
      while (lx.is_sym(",")) {
        lx.next();
        p->arg_texts.push_back(capture_arg(lx));
      }
    }
    lx.expect_sym(")");
    return p;
  }
  lx.fail("expected a process");
}

std::string capture_arg(Lexer& lx) {
  std::size_t from = lx.mark();
  int depth = 0;
  while (!lx.at_end()) {
    if (depth == 0 && (lx.is_sym(",") || lx.is_sym(")"))) break;
    const Token& t = lx.peek();
    if (t.kind == Tok::Sym) {
      if (t.text == "(" || t.text == "[") ++depth;
      if (t.text == ")" || t.text == "]") --depth;
    }
    lx.next();
  }
  return lx.slice(from, lx.mark());
}

SourceProcessPtr parse_process(Lexer& lx) {
  auto first = parse_prefix(lx);
  if (!lx.is_sym("||")) return first;
  auto p = sp(ProcKind::Par);
  p->children.push_back(first);
  while (lx.is_sym("||")) {
    lx.next();
    p->children.push_back(parse_prefix(lx));
  }
  return p;
}

}  // namespace

ProgramSource parse_program_source(const std::string& text) {
  Lexer lx(text);
  ProgramSource out;
  // Pragmas.
  while (true) {
    if (lx.is_kw("const") || lx.is_kw("pool") || lx.is_kw("global")) {
      bool is_pool = lx.is_kw("pool");
      bool is_global = lx.is_kw("global");
      lx.next();
      while (true) {
        std::string n = lx.expect_ident("name");
        if (is_pool)
          out.pool.push_back(n);
        else if (is_global)
          out.globals.push_back(n);
        else
          out.signature.constants.insert(n);
        if (lx.is_sym(",")) {
          lx.next();
          continue;
        }
        break;
      }
      lx.expect_sym(".");
      continue;
    }
    if (lx.is_kw("fun") || lx.is_kw("pred")) {
      bool is_pred = lx.is_kw("pred");
      lx.next();
      while (true) {
        std::string n = lx.expect_ident("symbol");
        lx.expect_sym("/");
        if (lx.peek().kind != Tok::Number) lx.fail("expected an arity");
        int arity = std::stoi(lx.next().text);
        if (is_pred)
          out.signature.predicates[n] = arity;
        else
          out.signature.functions[n] = arity;
        if (lx.is_sym(",")) {
          lx.next();
          continue;
        }
        break;
      }
      lx.expect_sym(".");
      continue;
    }
    break;
  }
  // Declarations: ident "(" params ")" "=" — decided by lookahead.
  while (lx.peek().kind == Tok::Ident && !is_keyword(lx.peek().text)) {
    std::size_t m = lx.mark();
    std::string name = lx.next().text;
    if (!lx.is_sym("(")) {
      lx.rewind(m);
      break;
    }
    lx.next();
    std::vector<std::string> params;
    bool shape_ok = true;
    if (!lx.is_sym(")")) {
      while (true) {
        if (lx.peek().kind != Tok::Ident) {
          shape_ok = false;
          break;
        }
        params.push_back(lx.next().text);
        if (lx.is_sym(",")) {
          lx.next();
          continue;
        }
        break;
      }
    }
    if (!shape_ok || !lx.is_sym(")")) {
      lx.rewind(m);
      break;
    }
    lx.next();
    if (!lx.is_sym("=")) {
      lx.rewind(m);
      break;
    }
    lx.next();
    out.decl_heads.emplace_back(name, params);
    out.decl_bodies.push_back(parse_process(lx));
    lx.expect_sym(";");
  }
  out.main = parse_process(lx);
  if (!lx.at_end()) lx.fail("trailing input after the main process");
  return out;
}

ProgramSource parse_program_file(const std::string& path) {
  std::ifstream in(path);
  check_usage(in.good(), "cannot open program file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program_source(ss.str());
}

RawFormula parse_raw_formula(const std::string& text, const Signature& sig) {
  Lexer lx(text);
  RawFormula out;
  int counter = 0;
  parse_conj_rec(lx, sig, out, {}, counter);
  if (!lx.at_end()) lx.fail("trailing input after constraint");
  return out;
}

Term parse_term(const std::string& text, const Signature& sig) {
  Lexer lx(text);
  Term t = parse_term_rec(lx, sig);
  if (!lx.at_end()) lx.fail("trailing input after term");
  return t;
}

TermVec parse_term_list(const std::string& text, const Signature& sig) {
  Lexer lx(text);
  TermVec out;
  if (lx.at_end()) return out;
  out.push_back(parse_term_rec(lx, sig));
  while (lx.is_sym(",")) {
    lx.next();
    out.push_back(parse_term_rec(lx, sig));
  }
  if (!lx.at_end()) lx.fail("trailing input after term list");
  return out;
}

namespace {

PosExpr parse_pos_iff(Lexer& lx);

PosExpr parse_pos_prim(Lexer& lx) {
  if (lx.is_kw("true")) {
    lx.next();
    return {PosExpr::Kind::True, "", {}};
  }
  if (lx.is_kw("false")) {
    lx.next();
    return {PosExpr::Kind::False, "", {}};
  }
  if (lx.is_sym("(")) {
    lx.next();
    PosExpr e = parse_pos_iff(lx);
    lx.expect_sym(")");
    return e;
  }
  std::string v = lx.expect_ident("a propositional variable");
  return {PosExpr::Kind::Var, v, {}};
}

PosExpr parse_pos_and(Lexer& lx) {
  PosExpr e = parse_pos_prim(lx);
  while (lx.is_sym("/\\")) {
    lx.next();
    PosExpr rhs = parse_pos_prim(lx);
    e = {PosExpr::Kind::And, "", {e, rhs}};
  }
  return e;
}

PosExpr parse_pos_or(Lexer& lx) {
  PosExpr e = parse_pos_and(lx);
  while (lx.is_sym("\\/")) {
    lx.next();
    PosExpr rhs = parse_pos_and(lx);
    e = {PosExpr::Kind::Or, "", {e, rhs}};
  }
  return e;
}

PosExpr parse_pos_iff(Lexer& lx) {
  PosExpr e = parse_pos_or(lx);
  while (lx.is_sym("<->")) {
    lx.next();
    PosExpr rhs = parse_pos_or(lx);
    e = {PosExpr::Kind::Iff, "", {e, rhs}};
  }
  return e;
}

}  // namespace

PosExpr parse_pos_expr(const std::string& text) {
  Lexer lx(text);
  PosExpr e = parse_pos_iff(lx);
  if (!lx.at_end()) lx.fail("trailing input after formula");
  return e;
}

std::vector<PredAtom> parse_simple_atoms(const std::string& text) {
  Lexer lx(text);
  std::vector<PredAtom> out;
  if (lx.is_kw("true") && lx.peek(1).kind == Tok::End) return out;
  while (true) {
    std::string name = lx.expect_ident("an atom");
    PredAtom a{name, {}};
    if (lx.is_sym("(")) {
      lx.next();
      if (!lx.is_sym(")")) {
        a.args.push_back(Term::var(lx.expect_ident("a variable")));
        while (lx.is_sym(",")) {
          lx.next();
          a.args.push_back(Term::var(lx.expect_ident("a variable")));
        }
      }
      lx.expect_sym(")");
    }
    out.push_back(std::move(a));
    if (lx.is_sym("/\\")) {
      lx.next();
      continue;
    }
    break;
  }
  if (!lx.at_end()) lx.fail("trailing input after atoms");
  return out;
}

std::pair<std::string, std::string> split_angle_pair(const std::string& text) {
  std::size_t i = 0;
  while (i < text.size() && isspace(static_cast<unsigned char>(text[i]))) ++i;
  if (i >= text.size() || text[i] != '<') throw ParseError("expected '<...,...>'", 1, 1);
  int depth = 0;
  std::size_t comma = std::string::npos;
  std::size_t close = std::string::npos;
  for (std::size_t j = i; j < text.size(); ++j) {
    char c = text[j];
    if (c == '<' || c == '(' || c == '[') ++depth;
    if (c == '>' || c == ')' || c == ']') {
      --depth;
      if (depth == 0 && c == '>') {
        close = j;
        break;
      }
    }
    if (c == ',' && depth == 1 && comma == std::string::npos) comma = j;
  }
  if (comma == std::string::npos || close == std::string::npos)
    throw ParseError("expected '<...,...>'", 1, 1);
  for (std::size_t j = close + 1; j < text.size(); ++j)
    if (!isspace(static_cast<unsigned char>(text[j])))
      throw ParseError("trailing input after '>'", 1, 1);
  return {text.substr(i + 1, comma - i - 1), text.substr(comma + 1, close - comma - 1)};
}

// --- binding -----------------------------------------------------------------

namespace {

struct Binder {
  const ConstraintSystem& sys;
  const Signature* sig;
  Program* prog;
  int bang_counter = 0;

  Process bind(const SourceProcessPtr& s) {
    Process p = bind_plain(s);
    if (!s->bang) return p;
    // !P  ==>  bang_i(xs) = P || next bang_i(xs)  with xs = fv(P).
    std::string name = "bang_" + std::to_string(bang_counter++);
    VarSet fv = free_vars(p);
    std::vector<std::string> params(fv.begin(), fv.end());
    TermVec args;
    for (const auto& v : params) args.push_back(Term::var(v));
    Declaration d;
    d.name = name;
    d.params = params;
    d.body = Process::par({p, Process::next(Process::call(name, args))});
    check_usage(prog->decls.emplace(name, d).second, "duplicate declaration " + name);
    return Process::call(name, args);
  }

  Process bind_plain(const SourceProcessPtr& s) {
    switch (s->kind) {
      case ProcKind::Skip:
        return Process::skip();
      case ProcKind::Tell:
        return Process::tell(sys.parse_constraint(s->constraint_text));
      case ProcKind::Abs: {
        Constraint g = sys.parse_constraint(s->constraint_text);
        return Process::abs(s->binders, g, bind(s->children[0]));
      }
      case ProcKind::Par: {
        std::vector<Process> cs;
        for (const auto& ch : s->children) cs.push_back(bind(ch));
        return Process::par(std::move(cs));
      }
      case ProcKind::Local:
        return Process::local(s->binders, bind(s->children[0]));
      case ProcKind::Next:
        return Process::next(bind(s->children[0]));
      case ProcKind::Unless:
        return Process::unless(sys.parse_constraint(s->constraint_text),
                               bind(s->children[0]));
      case ProcKind::Call: {
        TermVec args;
        static const Signature empty_sig;
        const Signature& sg = sig ? *sig : empty_sig;
        for (const auto& a : s->arg_texts) args.push_back(parse_term(a, sg));
        return Process::call(s->callee, std::move(args));
      }
    }
    throw InternalError("unreachable process kind");
  }
};

}  // namespace

Program bind_program(const ProgramSource& src, const ConstraintSystem& sys) {
  Program prog;
  Binder b{sys, nullptr, &prog};
  const auto* eq = dynamic_cast<const EquationSystem*>(&sys);
  if (eq) b.sig = &eq->signature();

  prog.globals.insert(src.globals.begin(), src.globals.end());
  for (std::size_t i = 0; i < src.decl_heads.size(); ++i) {
    Declaration d;
    d.name = src.decl_heads[i].first;
    d.params = src.decl_heads[i].second;
    d.body = b.bind(src.decl_bodies[i]);
    check_usage(prog.decls.emplace(d.name, d).second, "duplicate declaration " + d.name);
  }
  prog.main = b.bind(src.main);
  check_program(prog);
  return prog;
}

}  // namespace utcc
