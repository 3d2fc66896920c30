#include "qrm/frontend.h"

#include <cctype>
#include <cstdlib>
#include <set>
#include <sstream>
#include <vector>

#include "qrm/gates.h"

namespace qrm {
namespace {

enum class Tok { Ident, Int, Num, Sym, Ket0, Ket1, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  Span span;
};

const std::set<std::string> kKeywords = {"skip", "if",  "then",  "else", "fi",  "while", "do",
                                         "od",   "begin", "local", "end", "qif", "fiq",   "proc",
                                         "mod",  "not", "min",   "max"};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto adv = [&](size_t n) {
    for (size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') adv(1);
      continue;
    }
    Token t;
    t.span = {line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(src.substr(i, j - i));
      adv(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      bool frac = false;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j < src.size() && src[j] == '.') {
        frac = true;
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          frac = true;
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      t.kind = frac ? Tok::Num : Tok::Int;
      t.text = std::string(src.substr(i, j - i));
      adv(j - i);
    } else if (c == '|' && i + 2 < src.size() && (src[i + 1] == '0' || src[i + 1] == '1') &&
               src[i + 2] == '>') {
      t.kind = src[i + 1] == '0' ? Tok::Ket0 : Tok::Ket1;
      t.text = std::string(src.substr(i, 3));
      adv(3);
    } else {
      static const char* two[] = {":=", "<=", ">=", "!=", "->", "[]"};
      t.kind = Tok::Sym;
      for (const char* s : two)
        if (src.substr(i, 2) == s) t.text = s;
      if (t.text.empty()) {
        if (std::string_view("();,[]=<>+-*/").find(c) == std::string_view::npos)
          throw SyntaxError(std::string("unexpected character '") + c + "'", t.span);
        t.text = std::string(1, c);
      }
      adv(t.text.size());
    }
    out.push_back(std::move(t));
  }
  Token e;
  e.span = {line, col};
  out.push_back(e);
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  Program program() {
    Program p;
    while (!at_end()) {
      expect_kw("proc");
      Decl d;
      d.span = peek().span;
      d.name = ident();
      if (accept("[")) {
        d.index = static_cast<Word>(integer());
        expect("]");
      }
      expect("(");
      if (!accept(")")) {
        do d.formals.push_back(ident());
        while (accept(","));
        expect(")");
      }
      expect("<=");
      d.body = stmt();
      for (const auto& o : p.decls) {
        if (o.name == d.name && o.index == d.index)
          throw SyntaxError("duplicate declaration of " + d.label(), d.span);
        if (o.name == d.name && o.index.has_value() != d.index.has_value())
          throw SyntaxError(d.name + " declared both as a family and a procedure", d.span);
      }
      p.decls.push_back(std::move(d));
    }
    for (const char* m : {"Pmain", "main"})
      if (p.find(m, std::nullopt)) {
        p.main = m;
        break;
      }
    if (p.main.empty())
      for (const auto& d : p.decls)
        if (!d.index) {
          p.main = d.name;
          break;
        }
    if (p.main.empty()) throw SyntaxError("no main procedure", peek().span);
    return p;
  }

  StmtPtr stmt() {
    Span sp = peek().span;
    std::vector<StmtPtr> items{simple()};
    while (accept(";")) items.push_back(simple());
    if (items.size() == 1) return items[0];
    return mk_seq(items, sp);
  }

  ExprPtr expr() {
    ExprPtr a = additive();
    const Token& t = peek();
    if (t.kind != Tok::Sym) return a;
    Span sp = t.span;
    if (accept("=")) return mk_binary(Op::Eq, a, additive(), sp);
    if (accept("!=")) return mk_binary(Op::Ne, a, additive(), sp);
    if (accept("<")) return mk_binary(Op::Lt, a, additive(), sp);
    if (accept("<=")) return mk_binary(Op::Le, a, additive(), sp);
    if (accept(">")) return mk_binary(Op::Lt, additive(), a, sp);
    if (accept(">=")) return mk_binary(Op::Le, additive(), a, sp);
    return a;
  }

  bool at_end() const { return peek().kind == Tok::End; }
  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }

 private:
  StmtPtr simple() {
    const Token& t = peek();
    Span sp = t.span;
    if (t.kind != Tok::Ident) throw SyntaxError("expected a statement, found '" + t.text + "'", sp);
    if (t.text == "skip") {
      ++pos_;
      return mk_skip(sp);
    }
    if (t.text == "if") {
      ++pos_;
      ExprPtr c = expr();
      expect_kw("then");
      StmtPtr a = stmt();
      StmtPtr b = mk_skip(peek().span);
      if (accept_kw("else")) b = stmt();
      expect_kw("fi");
      return mk_if(c, a, b, sp);
    }
    if (t.text == "while") {
      ++pos_;
      ExprPtr c = expr();
      expect_kw("do");
      StmtPtr b = stmt();
      expect_kw("od");
      return mk_while(c, b, sp);
    }
    if (t.text == "begin") {
      ++pos_;
      expect_kw("local");
      std::vector<Ref> locals{ref()};
      while (accept(",")) locals.push_back(ref());
      expect(":=");
      std::vector<ExprPtr> inits{expr()};
      while (accept(",")) inits.push_back(expr());
      if (inits.size() != locals.size()) throw SyntaxError("local list length mismatch", sp);
      expect(";");
      StmtPtr b = stmt();
      expect_kw("end");
      return mk_block(locals, inits, b, sp);
    }
    if (t.text == "qif") {
      ++pos_;
      expect("[");
      Ref coin = ref();
      expect("]");
      expect("(");
      expect_tok(Tok::Ket0, "|0>");
      expect("->");
      StmtPtr b0 = stmt();
      expect(")");
      expect("[]");
      expect("(");
      expect_tok(Tok::Ket1, "|1>");
      expect("->");
      StmtPtr b1 = stmt();
      expect(")");
      expect_kw("fiq");
      return mk_qif(coin, b0, b1, sp);
    }
    if (kKeywords.count(t.text)) throw SyntaxError("unexpected keyword '" + t.text + "'", sp);
    if (gate_arity(t.text) > 0) return gate();

    std::vector<Ref> lhs{ref()};
    if (peek().text == ":=" || peek().text == ",") {
      while (accept(",")) lhs.push_back(ref());
      expect(":=");
      std::vector<ExprPtr> rhs{expr()};
      while (accept(",")) rhs.push_back(expr());
      if (rhs.size() != lhs.size()) throw SyntaxError("assignment list length mismatch", sp);
      return mk_assign(lhs, rhs, sp);
    }
    std::vector<ExprPtr> actuals;
    if (accept("(")) {
      if (!accept(")")) {
        do actuals.push_back(expr());
        while (accept(","));
        expect(")");
      }
    }
    return mk_call(lhs[0], actuals, sp);
  }

  StmtPtr gate() {
    Span sp = peek().span;
    std::string name = ident();
    std::vector<double> params;
    if (accept("(")) {
      params.push_back(number());
      while (accept(",")) params.push_back(number());
      expect(")");
    }
    if (!make_gate(name, params)) throw SyntaxError("bad parameters for gate " + name, sp);
    expect("[");
    std::vector<Ref> qs{ref()};
    while (accept(",")) qs.push_back(ref());
    expect("]");
    if (static_cast<int>(qs.size()) != gate_arity(name))
      throw SyntaxError("gate " + name + " takes " + std::to_string(gate_arity(name)) + " qubits", sp);
    return mk_gate(name, params, qs, sp);
  }

  Ref ref() {
    Ref r;
    r.span = peek().span;
    r.name = ident();
    if (accept("[")) {
      r.index = expr();
      expect("]");
    }
    return r;
  }

  ExprPtr additive() {
    ExprPtr a = multiplicative();
    for (;;) {
      Span sp = peek().span;
      if (accept("+")) a = mk_binary(Op::Add, a, multiplicative(), sp);
      else if (accept("-")) a = mk_binary(Op::Sub, a, multiplicative(), sp);
      else return a;
    }
  }

  ExprPtr multiplicative() {
    ExprPtr a = unary();
    for (;;) {
      Span sp = peek().span;
      if (accept("*")) a = mk_binary(Op::Mul, a, unary(), sp);
      else if (accept("/")) a = mk_binary(Op::Div, a, unary(), sp);
      else if (accept_kw("mod")) a = mk_binary(Op::Mod, a, unary(), sp);
      else return a;
    }
  }

  ExprPtr unary() {
    Span sp = peek().span;
    if (accept("-")) return mk_unary(Op::Neg, unary(), sp);
    if (accept_kw("not")) return mk_unary(Op::Not, unary(), sp);
    return primary();
  }

  ExprPtr primary() {
    const Token& t = peek();
    Span sp = t.span;
    if (t.kind == Tok::Int) return mk_const(static_cast<Word>(integer()), sp);
    if (accept("(")) {
      ExprPtr e = expr();
      expect(")");
      return e;
    }
    if (t.kind == Tok::Ident && (t.text == "min" || t.text == "max")) {
      Op op = t.text == "min" ? Op::Min : Op::Max;
      ++pos_;
      expect("(");
      ExprPtr a = expr();
      expect(",");
      ExprPtr b = expr();
      expect(")");
      return mk_binary(op, a, b, sp);
    }
    if (t.kind == Tok::Ident && !kKeywords.count(t.text)) {
      std::string n = ident();
      if (accept("[")) {
        ExprPtr s = expr();
        expect("]");
        return mk_index(n, s, sp);
      }
      return mk_var(n, sp);
    }
    throw SyntaxError("expected an expression, found '" + t.text + "'", sp);
  }

  unsigned long long integer() {
    const Token& t = peek();
    if (t.kind != Tok::Int) throw SyntaxError("expected an integer", t.span);
    unsigned long long v = std::strtoull(t.text.c_str(), nullptr, 10);
    if (v > 0xffffffffull) throw SyntaxError("integer does not fit a word", t.span);
    ++pos_;
    return v;
  }

  double number() {
    bool neg = accept("-");
    const Token& t = peek();
    if (t.kind != Tok::Int && t.kind != Tok::Num) throw SyntaxError("expected a number", t.span);
    double v = std::strtod(t.text.c_str(), nullptr);
    ++pos_;
    return neg ? -v : v;
  }

  std::string ident() {
    const Token& t = peek();
    if (t.kind != Tok::Ident || kKeywords.count(t.text))
      throw SyntaxError("expected an identifier, found '" + t.text + "'", t.span);
    ++pos_;
    return t.text;
  }

  bool accept(const char* s) {
    if (peek().kind == Tok::Sym && peek().text == s) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool accept_kw(const char* s) {
    if (peek().kind == Tok::Ident && peek().text == s) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(const char* s) {
    if (!accept(s)) throw SyntaxError(std::string("expected '") + s + "', found '" + peek().text + "'", peek().span);
  }
  void expect_kw(const char* s) {
    if (!accept_kw(s)) throw SyntaxError(std::string("expected '") + s + "', found '" + peek().text + "'", peek().span);
  }
  void expect_tok(Tok k, const char* what) {
    if (peek().kind != k) throw SyntaxError(std::string("expected '") + what + "'", peek().span);
    ++pos_;
  }

  std::vector<Token> toks_;
  size_t pos_ = 0;
};

int prec(const ExprPtr& e) {
  if (e->kind != Expr::Kind::Binary) return e->kind == Expr::Kind::Unary ? 4 : 5;
  switch (e->op) {
    case Op::Eq: case Op::Ne: case Op::Lt: case Op::Le: return 1;
    case Op::Add: case Op::Sub: return 2;
    case Op::Mul: case Op::Div: case Op::Mod: return 3;
    default: return 5;  // min/max print as calls
  }
}

std::string wrap(const ExprPtr& e, bool paren) {
  std::string s = print(e);
  return paren ? "(" + s + ")" : s;
}

void print_stmt(std::ostringstream& os, const StmtPtr& s, int ind);

void line(std::ostringstream& os, int ind) { os << std::string(ind * 2, ' '); }

void print_stmt(std::ostringstream& os, const StmtPtr& s, int ind) {
  switch (s->kind) {
    case StmtKind::Skip: line(os, ind); os << "skip"; return;
    case StmtKind::Assign: {
      line(os, ind);
      for (size_t i = 0; i < s->targets.size(); ++i) os << (i ? ", " : "") << print(s->targets[i]);
      os << " := ";
      for (size_t i = 0; i < s->exprs.size(); ++i) os << (i ? ", " : "") << print(s->exprs[i]);
      return;
    }
    case StmtKind::Gate: {
      line(os, ind);
      os << s->gate;
      if (!s->gate_params.empty()) {
        os << "(";
        for (size_t i = 0; i < s->gate_params.size(); ++i) os << (i ? ", " : "") << format_double(s->gate_params[i]);
        os << ")";
      }
      os << "[";
      for (size_t i = 0; i < s->qargs.size(); ++i) os << (i ? ", " : "") << print(s->qargs[i]);
      os << "]";
      return;
    }
    case StmtKind::Seq:
      for (size_t i = 0; i < s->body.size(); ++i) {
        if (i) os << ";\n";
        print_stmt(os, s->body[i], ind);
      }
      return;
    case StmtKind::Call: {
      line(os, ind);
      os << print(s->ref) << "(";
      for (size_t i = 0; i < s->exprs.size(); ++i) os << (i ? ", " : "") << print(s->exprs[i]);
      os << ")";
      return;
    }
    case StmtKind::If:
      line(os, ind);
      os << "if " << print(s->cond) << " then\n";
      print_stmt(os, s->body[0], ind + 1);
      os << "\n";
      line(os, ind);
      os << "else\n";
      print_stmt(os, s->body[1], ind + 1);
      os << "\n";
      line(os, ind);
      os << "fi";
      return;
    case StmtKind::While:
      line(os, ind);
      os << "while " << print(s->cond) << " do\n";
      print_stmt(os, s->body[0], ind + 1);
      os << "\n";
      line(os, ind);
      os << "od";
      return;
    case StmtKind::Block:
      line(os, ind);
      os << "begin local ";
      for (size_t i = 0; i < s->targets.size(); ++i) os << (i ? ", " : "") << print(s->targets[i]);
      os << " := ";
      for (size_t i = 0; i < s->exprs.size(); ++i) os << (i ? ", " : "") << print(s->exprs[i]);
      os << ";\n";
      print_stmt(os, s->body[0], ind + 1);
      os << "\n";
      line(os, ind);
      os << "end";
      return;
    case StmtKind::Qif:
      line(os, ind);
      os << "qif[" << print(s->ref) << "] (|0> ->\n";
      print_stmt(os, s->body[0], ind + 2);
      os << "\n";
      line(os, ind);
      os << ") [] (|1> ->\n";
      print_stmt(os, s->body[1], ind + 2);
      os << "\n";
      line(os, ind);
      os << ") fiq";
      return;
  }
}

}  // namespace

Program parse(std::string_view text) { return Parser(text).program(); }

StmtPtr parse_stmt(std::string_view text) {
  Parser p(text);
  StmtPtr s = p.stmt();
  if (!p.at_end()) throw SyntaxError("trailing input '" + p.peek().text + "'", p.peek().span);
  return s;
}

ExprPtr parse_expr(std::string_view text) {
  Parser p(text);
  ExprPtr e = p.expr();
  if (!p.at_end()) throw SyntaxError("trailing input '" + p.peek().text + "'", p.peek().span);
  return e;
}

std::string print(const ExprPtr& e) {
  switch (e->kind) {
    case Expr::Kind::Const: return std::to_string(e->value);
    case Expr::Kind::Var: return e->name;
    case Expr::Kind::Index: return e->name + "[" + print(e->a) + "]";
    case Expr::Kind::Unary:
      return (e->op == Op::Neg ? "-" : "not ") + wrap(e->a, prec(e->a) < 4);
    case Expr::Kind::Binary: {
      if (e->op == Op::Min || e->op == Op::Max)
        return std::string(op_symbol(e->op)) + "(" + print(e->a) + ", " + print(e->b) + ")";
      int p = prec(e);
      bool cmp = p == 1;
      return wrap(e->a, cmp ? prec(e->a) <= p : prec(e->a) < p) + " " +
             std::string(op_symbol(e->op)) + " " + wrap(e->b, prec(e->b) <= p);
    }
  }
  return {};
}

std::string print(const Ref& r) { return r.index ? r.name + "[" + print(r.index) + "]" : r.name; }

std::string print(const StmtPtr& s, int indent) {
  std::ostringstream os;
  print_stmt(os, s, indent);
  return os.str();
}

std::string print(const Program& p) {
  std::ostringstream os;
  // main first so that reparsing picks the same main procedure
  std::vector<const Decl*> order;
  for (const auto& d : p.decls)
    if (d.name == p.main && !d.index) order.push_back(&d);
  for (const auto& d : p.decls)
    if (!(d.name == p.main && !d.index)) order.push_back(&d);
  for (size_t k = 0; k < order.size(); ++k) {
    const Decl& d = *order[k];
    if (k) os << "\n";
    os << "proc " << d.label() << "(";
    for (size_t i = 0; i < d.formals.size(); ++i) os << (i ? ", " : "") << d.formals[i];
    os << ") <=\n";
    print_stmt(os, d.body, 1);
    os << "\n";
  }
  return os.str();
}

}  // namespace qrm
