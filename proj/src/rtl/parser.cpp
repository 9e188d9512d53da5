// SPDX-License-Identifier: Apache-2.0
#include "htkit/rtl/parser.hpp"

#include "htkit/rtl/primitives.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <stdexcept>

namespace htkit::rtl {

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int line = 1;
  int col = 1;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {
      "module", "endmodule", "input",  "output", "wire",    "reg",     "localparam",
      "assign", "always",    "posedge", "begin", "end",     "if",      "else",
      "case",   "endcase",   "default", "or"};
  return k;
}

// Recognized Verilog keywords that lie outside the subset.
const std::set<std::string>& unsupported_keywords() {
  static const std::set<std::string> k = {
      "initial",  "generate", "endgenerate", "function", "endfunction", "task",     "endtask",
      "parameter", "integer", "real",        "time",     "for",         "while",    "repeat",
      "forever",  "casez",    "casex",       "negedge",  "inout",       "genvar",   "defparam",
      "fork",     "join",     "signed",      "always_ff", "always_comb", "always_latch",
      "logic",    "wait",     "tri",         "supply0",  "supply1",     "wand",     "wor",
      "specify",  "primitive", "force",      "release",  "deassign",    "disable",  "automatic",
      "interface", "package", "typedef",     "enum",     "struct",      "unique",   "priority",
      "localparam_type"};
  return k;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space_and_comments();
      Token t;
      t.line = line_;
      t.col = col_;
      if (pos_ >= src_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::Ident;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
                src_[pos_] == '$')) {
          t.text.push_back(take());
        }
      } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '\'') {
        t.kind = Tok::Number;
        lex_number(t);
      } else if (c == '$') {
        std::string name;
        name.push_back(take());
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          name.push_back(take());
        }
        throw UnsupportedConstruct(name, {t.line, t.col, t.line});
      } else if (c == '`') {
        std::string name;
        name.push_back(take());
        while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) {
          name.push_back(take());
        }
        throw UnsupportedConstruct(name, {t.line, t.col, t.line});
      } else if (c == '\\') {
        throw UnsupportedConstruct("escaped identifier", {t.line, t.col, t.line});
      } else {
        t.kind = Tok::Punct;
        lex_punct(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char take() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        take();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') take();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        int l = line_, cl = col_;
        take();
        take();
        while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) take();
        if (pos_ + 1 >= src_.size()) throw SyntaxError(l, cl, "end of block comment");
        take();
        take();
      } else {
        return;
      }
    }
  }

  void lex_number(Token& t) {
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      t.text.push_back(take());
    }
    // Allow whitespace between size and base as Verilog does.
    std::size_t save = pos_;
    int save_line = line_, save_col = col_;
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) take();
    if (pos_ < src_.size() && src_[pos_] == '\'') {
      t.text.push_back(take());
      if (pos_ < src_.size() && (src_[pos_] == 's' || src_[pos_] == 'S')) {
        throw UnsupportedConstruct("signed literal", {t.line, t.col, t.line});
      }
      if (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) {
        t.text.push_back(take());
      }
      while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t')) take();
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_' ||
              src_[pos_] == '?')) {
        t.text.push_back(take());
      }
    } else {
      pos_ = save;
      line_ = save_line;
      col_ = save_col;
    }
  }

  void lex_punct(Token& t) {
    static const char* three[] = {"===", "!==", "<<<", ">>>"};
    static const char* two[] = {"==", "!=", "<=", ">=", "&&", "||", "<<", ">>", "**",
                                "~&", "~|", "~^", "^~", "->", "::", "+:", "-:"};
    auto starts = [&](const char* s) {
      std::size_t n = std::char_traits<char>::length(s);
      return src_.substr(pos_, n) == s;
    };
    for (const char* s : three) {
      if (starts(s)) {
        for (int i = 0; i < 3; ++i) t.text.push_back(take());
        return;
      }
    }
    for (const char* s : two) {
      if (starts(s)) {
        t.text.push_back(take());
        t.text.push_back(take());
        return;
      }
    }
    t.text.push_back(take());
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  RtlDesign parse_design() {
    RtlDesign d;
    if (peek().kind == Tok::End) throw SyntaxError(peek().line, peek().col, "'module'");
    while (peek().kind != Tok::End) {
      const Token& t = peek();
      if (t.kind == Tok::Ident && t.text == "module") {
        d.modules.push_back(parse_module());
      } else {
        unsupported_or_syntax(t, "'module'");
      }
    }
    return d;
  }

 private:
  const Token& peek(int ahead = 0) const {
    std::size_t i = std::min(idx_ + ahead, toks_.size() - 1);
    return toks_[i];
  }

  Token next() {
    Token t = peek();
    if (idx_ < toks_.size() - 1) ++idx_;
    return t;
  }

  static SourceSpan span_of(const Token& t) { return {t.line, t.col, t.line}; }

  [[noreturn]] void unsupported_or_syntax(const Token& t, const std::string& expected) {
    if (t.kind == Tok::Ident && unsupported_keywords().count(t.text)) {
      throw UnsupportedConstruct(t.text, span_of(t));
    }
    if (t.kind == Tok::Punct) {
      static const std::set<std::string> ops = {"===", "!==", "<<<", ">>>", "<<", ">>", "**",
                                                "~&", "~|", "~^", "^~", "*", "/", "%", "#",
                                                "@", "->", "+:", "-:"};
      if (ops.count(t.text)) throw UnsupportedConstruct(t.text, span_of(t));
    }
    throw SyntaxError(t.line, t.col, expected);
  }

  bool is_punct(const std::string& p, int ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::Punct && t.text == p;
  }

  bool is_kw(const std::string& k, int ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Tok::Ident && t.text == k;
  }

  Token expect_punct(const std::string& p) {
    if (!is_punct(p)) unsupported_or_syntax(peek(), "'" + p + "'");
    return next();
  }

  Token expect_kw(const std::string& k) {
    if (!is_kw(k)) unsupported_or_syntax(peek(), "'" + k + "'");
    return next();
  }

  Token expect_ident() {
    const Token& t = peek();
    if (t.kind != Tok::Ident || keywords().count(t.text) || unsupported_keywords().count(t.text)) {
      unsupported_or_syntax(t, "identifier");
    }
    return next();
  }

  // [msb:0] -> width
  int parse_range() {
    Token open = expect_punct("[");
    Token msb_tok = next();
    if (msb_tok.kind != Tok::Number || msb_tok.text.find('\'') != std::string::npos) {
      throw SyntaxError(msb_tok.line, msb_tok.col, "integer range bound");
    }
    expect_punct(":");
    Token lsb_tok = next();
    if (lsb_tok.kind != Tok::Number || lsb_tok.text.find('\'') != std::string::npos) {
      throw SyntaxError(lsb_tok.line, lsb_tok.col, "integer range bound");
    }
    expect_punct("]");
    long msb = std::stol(strip_underscores(msb_tok.text));
    long lsb = std::stol(strip_underscores(lsb_tok.text));
    if (lsb != 0) throw UnsupportedConstruct("range with nonzero lsb", span_of(open));
    if (msb < 0 || msb > 65535) throw SyntaxError(msb_tok.line, msb_tok.col, "msb in [0, 65535]");
    return static_cast<int>(msb) + 1;
  }

  static std::string strip_underscores(const std::string& s) {
    std::string r;
    for (char c : s) {
      if (c != '_') r.push_back(c);
    }
    return r;
  }

  RtlModule parse_module() {
    Token kw = expect_kw("module");
    RtlModule m;
    m.span = span_of(kw);
    m.name = expect_ident().text;
    if (is_punct("#")) throw UnsupportedConstruct("parameter port list", span_of(peek()));
    expect_punct("(");
    if (!is_punct(")")) {
      std::optional<PortDecl> current;
      while (true) {
        const Token& t = peek();
        if (is_kw("input") || is_kw("output")) {
          PortDecl p;
          p.span = span_of(t);
          p.direction = next().text == "input" ? Direction::Input : Direction::Output;
          if (is_kw("wire")) {
            next();
          } else if (is_kw("reg")) {
            Token r = next();
            if (p.direction == Direction::Input) throw UnsupportedConstruct("input reg", span_of(r));
            p.kind = NetKind::Reg;
          }
          if (is_kw("signed")) throw UnsupportedConstruct("signed", span_of(peek()));
          if (is_punct("[")) p.width = parse_range();
          Token name = expect_ident();
          p.name = name.text;
          p.span = span_of(name);
          current = p;
          m.ports.push_back(p);
        } else if (is_kw("inout")) {
          throw UnsupportedConstruct("inout", span_of(t));
        } else if (t.kind == Tok::Ident && current && !keywords().count(t.text)) {
          // `input wire a, b`: b inherits the previous declaration.
          PortDecl p = *current;
          Token name = expect_ident();
          p.name = name.text;
          p.span = span_of(name);
          m.ports.push_back(p);
        } else {
          if (t.kind == Tok::Ident && !keywords().count(t.text) &&
              !unsupported_keywords().count(t.text)) {
            throw UnsupportedConstruct("non-ANSI port list", span_of(t));
          }
          unsupported_or_syntax(t, "port declaration");
        }
        if (is_punct(",")) {
          next();
          continue;
        }
        break;
      }
    }
    expect_punct(")");
    expect_punct(";");

    while (!is_kw("endmodule")) {
      const Token& t = peek();
      if (t.kind == Tok::End) throw SyntaxError(t.line, t.col, "'endmodule'");
      if (is_kw("wire") || is_kw("reg")) {
        parse_net_decl(m);
      } else if (is_kw("localparam")) {
        parse_localparam(m);
      } else if (is_kw("assign")) {
        parse_assign(m);
      } else if (is_kw("always")) {
        parse_always(m);
      } else if (is_kw("input") || is_kw("output")) {
        throw UnsupportedConstruct("non-ANSI port declaration", span_of(t));
      } else if (t.kind == Tok::Ident && !keywords().count(t.text) &&
                 !unsupported_keywords().count(t.text)) {
        parse_instance(m);
      } else {
        unsupported_or_syntax(t, "module item");
      }
    }
    Token end = expect_kw("endmodule");
    m.span.end_line = end.line;
    return m;
  }

  void parse_net_decl(RtlModule& m) {
    Token kw = next();
    NetKind kind = kw.text == "reg" ? NetKind::Reg : NetKind::Wire;
    if (is_kw("signed")) throw UnsupportedConstruct("signed", span_of(peek()));
    int width = 1;
    if (is_punct("[")) width = parse_range();
    while (true) {
      Token name = expect_ident();
      if (is_punct("[")) throw UnsupportedConstruct("memory array declaration", span_of(peek()));
      if (is_punct("=")) throw UnsupportedConstruct("net declaration assignment", span_of(peek()));
      m.nets.push_back({name.text, kind, width, span_of(name)});
      if (is_punct(",")) {
        next();
        continue;
      }
      break;
    }
    expect_punct(";");
  }

  void parse_localparam(RtlModule& m) {
    Token kw = next();
    LocalParamGroup g;
    g.span = span_of(kw);
    if (is_punct("[")) g.width = parse_range();
    while (true) {
      Token name = expect_ident();
      expect_punct("=");
      Token vt = peek();
      ExprPtr v = parse_expr();
      if (v->kind != ExprKind::Const) {
        throw UnsupportedConstruct("non-literal localparam value", span_of(vt));
      }
      if (g.width && v->sized && v->value.width() != *g.width) {
        // Sized literal resized to the declared range, as Verilog assigns it.
        auto c = std::make_shared<Expr>(*v);
        c->value = v->value.resized(*g.width);
        v = c;
      }
      g.entries.push_back({name.text, v, span_of(name)});
      if (is_punct(",")) {
        next();
        continue;
      }
      break;
    }
    Token semi = expect_punct(";");
    g.span.end_line = semi.line;
    m.params.push_back(std::move(g));
  }

  void parse_assign(RtlModule& m) {
    Token kw = next();
    if (is_punct("#")) throw UnsupportedConstruct("#", span_of(peek()));
    ContinuousAssign a;
    a.span = span_of(kw);
    a.lhs = parse_lvalue();
    expect_punct("=");
    a.rhs = parse_expr();
    Token semi = expect_punct(";");
    a.span.end_line = semi.line;
    m.assigns.push_back(std::move(a));
  }

  void parse_always(RtlModule& m) {
    Token kw = next();
    AlwaysBlock b;
    b.span = span_of(kw);
    if (!is_punct("@")) throw UnsupportedConstruct("always without event control", span_of(peek()));
    next();
    if (is_punct("*")) {
      next();
      b.kind = AlwaysKind::Combinational;
    } else {
      expect_punct("(");
      if (is_punct("*")) {
        next();
        b.kind = AlwaysKind::Combinational;
      } else if (is_kw("posedge")) {
        next();
        b.kind = AlwaysKind::Clocked;
        b.clock = expect_ident().text;
        if (is_kw("or") || is_punct(",")) {
          throw UnsupportedConstruct("multiple clock/reset edges", span_of(peek()));
        }
      } else if (is_kw("negedge")) {
        throw UnsupportedConstruct("negedge", span_of(peek()));
      } else {
        b.kind = AlwaysKind::Combinational;
        while (true) {
          if (is_kw("posedge") || is_kw("negedge")) {
            throw UnsupportedConstruct("mixed edge sensitivity", span_of(peek()));
          }
          b.sensitivity.push_back(expect_ident().text);
          if (is_kw("or") || is_punct(",")) {
            next();
            continue;
          }
          break;
        }
      }
      expect_punct(")");
    }
    b.body = parse_stmt();
    b.span.end_line = last_line_;
    m.processes.push_back(std::move(b));
  }

  void parse_instance(RtlModule& m) {
    Token mod = expect_ident();
    ModuleInst inst;
    inst.span = span_of(mod);
    inst.module_name = mod.text;
    if (is_punct("#")) throw UnsupportedConstruct("parameter override", span_of(peek()));
    inst.instance_name = expect_ident().text;
    expect_punct("(");
    if (!is_punct(")")) {
      while (true) {
        if (!is_punct(".")) {
          throw UnsupportedConstruct("positional port connection", span_of(peek()));
        }
        Token dot = next();
        PortConnection c;
        c.span = span_of(dot);
        c.port = expect_ident().text;
        expect_punct("(");
        if (!is_punct(")")) c.expr = parse_expr();
        expect_punct(")");
        inst.connections.push_back(std::move(c));
        if (is_punct(",")) {
          next();
          continue;
        }
        break;
      }
    }
    expect_punct(")");
    Token semi = expect_punct(";");
    inst.span.end_line = semi.line;
    m.instances.push_back(std::move(inst));
  }

  StmtPtr parse_stmt() {
    const Token& t = peek();
    SourceSpan sp = span_of(t);
    if (is_kw("begin")) {
      next();
      if (is_punct(":")) throw UnsupportedConstruct("named block", span_of(peek()));
      std::vector<StmtPtr> body;
      while (!is_kw("end")) {
        if (peek().kind == Tok::End) throw SyntaxError(peek().line, peek().col, "'end'");
        body.push_back(parse_stmt());
      }
      Token e = next();
      last_line_ = e.line;
      auto s = std::make_shared<Stmt>(*make_block(std::move(body)));
      s->span = sp;
      s->span.end_line = e.line;
      return s;
    }
    if (is_kw("if")) {
      next();
      expect_punct("(");
      ExprPtr c = parse_expr();
      expect_punct(")");
      StmtPtr th = parse_stmt();
      StmtPtr el;
      if (is_kw("else")) {
        next();
        el = parse_stmt();
      }
      auto s = std::make_shared<Stmt>(*make_if(c, th, el));
      s->span = sp;
      s->span.end_line = last_line_;
      return s;
    }
    if (is_kw("case")) {
      next();
      expect_punct("(");
      ExprPtr subj = parse_expr();
      expect_punct(")");
      std::vector<CaseArm> arms;
      while (!is_kw("endcase")) {
        if (peek().kind == Tok::End) throw SyntaxError(peek().line, peek().col, "'endcase'");
        CaseArm arm;
        arm.span = span_of(peek());
        if (is_kw("default")) {
          next();
          if (is_punct(":")) next();
        } else {
          while (true) {
            arm.labels.push_back(parse_expr());
            if (is_punct(",")) {
              next();
              continue;
            }
            break;
          }
          expect_punct(":");
        }
        arm.body = parse_stmt();
        arm.span.end_line = last_line_;
        arms.push_back(std::move(arm));
      }
      Token e = next();
      last_line_ = e.line;
      auto s = std::make_shared<Stmt>(*make_case(subj, std::move(arms)));
      s->span = sp;
      s->span.end_line = e.line;
      return s;
    }
    if (is_punct(";")) {
      Token semi = next();
      last_line_ = semi.line;
      auto s = std::make_shared<Stmt>(*make_block({}));
      s->span = sp;
      return s;
    }
    if (t.kind == Tok::Ident && !keywords().count(t.text) && !unsupported_keywords().count(t.text)) {
      ExprPtr lhs = parse_lvalue();
      bool nb;
      if (is_punct("<=")) {
        nb = true;
      } else if (is_punct("=")) {
        nb = false;
      } else {
        unsupported_or_syntax(peek(), "'=' or '<='");
      }
      next();
      if (is_punct("#")) throw UnsupportedConstruct("#", span_of(peek()));
      ExprPtr rhs = parse_expr();
      Token semi = expect_punct(";");
      last_line_ = semi.line;
      auto s = std::make_shared<Stmt>(*make_assign(lhs, rhs, nb));
      s->span = sp;
      s->span.end_line = semi.line;
      return s;
    }
    unsupported_or_syntax(t, "statement");
  }

  ExprPtr parse_lvalue() {
    const Token& t = peek();
    if (is_punct("{")) throw UnsupportedConstruct("concatenation target", span_of(t));
    Token name = expect_ident();
    return parse_select_suffix(name);
  }

  ExprPtr parse_select_suffix(const Token& name) {
    if (!is_punct("[")) {
      auto e = std::make_shared<Expr>(*make_ident(name.text));
      e->span = span_of(name);
      return e;
    }
    next();
    ExprPtr first = parse_expr();
    if (is_punct(":")) {
      next();
      Token lsb = next();
      expect_punct("]");
      if (first->kind != ExprKind::Const || lsb.kind != Tok::Number ||
          lsb.text.find('\'') != std::string::npos) {
        throw UnsupportedConstruct("non-constant part select", span_of(name));
      }
      int msb_v = static_cast<int>(first->value.to_u64());
      int lsb_v = std::stoi(strip_underscores(lsb.text));
      if (msb_v < lsb_v) throw UnsupportedConstruct("descending part select", span_of(name));
      auto e = std::make_shared<Expr>(*make_part_select(name.text, msb_v, lsb_v));
      e->span = span_of(name);
      return e;
    }
    if (is_punct("+:") || is_punct("-:")) throw UnsupportedConstruct(peek().text, span_of(peek()));
    expect_punct("]");
    if (is_punct("[")) throw UnsupportedConstruct("multi-dimensional select", span_of(peek()));
    auto e = std::make_shared<Expr>(*make_bit_select(name.text, first));
    e->span = span_of(name);
    return e;
  }

  // ---- expressions, lowest precedence first --------------------------------

  ExprPtr parse_expr() { return parse_ternary(); }

  ExprPtr with_span(ExprPtr e, const SourceSpan& sp) {
    auto c = std::make_shared<Expr>(*e);
    c->span = sp;
    return c;
  }

  ExprPtr parse_ternary() {
    SourceSpan sp = span_of(peek());
    ExprPtr c = parse_binary(0);
    if (!is_punct("?")) return c;
    next();
    ExprPtr t = parse_ternary();
    expect_punct(":");
    ExprPtr f = parse_ternary();
    return with_span(make_ternary(c, t, f), sp);
  }

  static int precedence(const Token& t, BinaryOp& op) {
    if (t.kind != Tok::Punct) return -1;
    static const std::map<std::string, std::pair<int, BinaryOp>> table = {
        {"||", {0, BinaryOp::LogOr}}, {"&&", {1, BinaryOp::LogAnd}}, {"|", {2, BinaryOp::Or}},
        {"^", {3, BinaryOp::Xor}},    {"&", {4, BinaryOp::And}},     {"==", {5, BinaryOp::Eq}},
        {"!=", {5, BinaryOp::Ne}},    {"<", {6, BinaryOp::Lt}},      {"<=", {6, BinaryOp::Le}},
        {">", {6, BinaryOp::Gt}},     {">=", {6, BinaryOp::Ge}},     {"+", {7, BinaryOp::Add}},
        {"-", {7, BinaryOp::Sub}}};
    auto it = table.find(t.text);
    if (it == table.end()) return -1;
    op = it->second.second;
    return it->second.first;
  }

  ExprPtr parse_binary(int min_prec) {
    SourceSpan sp = span_of(peek());
    ExprPtr lhs = parse_unary();
    while (true) {
      const Token& t = peek();
      if (t.kind == Tok::Punct) {
        static const std::set<std::string> bad = {"===", "!==", "<<", ">>", "<<<", ">>>", "*",
                                                  "/",   "%",   "**", "~^", "^~"};
        if (bad.count(t.text)) throw UnsupportedConstruct(t.text, span_of(t));
      }
      BinaryOp op;
      int p = precedence(t, op);
      if (p < 0 || p < min_prec) return lhs;
      next();
      ExprPtr rhs = parse_binary(p + 1);
      lhs = with_span(make_binary(op, lhs, rhs), sp);
    }
  }

  ExprPtr parse_unary() {
    const Token& t = peek();
    if (is_punct("~") || is_punct("!")) {
      SourceSpan sp = span_of(t);
      UnaryOp op = next().text == "~" ? UnaryOp::BitNot : UnaryOp::LogNot;
      return with_span(make_unary(op, parse_unary()), sp);
    }
    if (is_punct("-") || is_punct("+")) throw UnsupportedConstruct("unary " + t.text, span_of(t));
    if (is_punct("&") || is_punct("|") || is_punct("^") || is_punct("~&") || is_punct("~|")) {
      throw UnsupportedConstruct("reduction " + t.text, span_of(t));
    }
    return parse_primary();
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    if (t.kind == Tok::Number) return parse_number(next());
    if (is_punct("(")) {
      next();
      ExprPtr e = parse_expr();
      expect_punct(")");
      return e;
    }
    if (is_punct("{")) {
      SourceSpan sp = span_of(next());
      std::vector<ExprPtr> parts;
      while (true) {
        ExprPtr p = parse_expr();
        if (is_punct("{")) throw UnsupportedConstruct("replication", sp);
        if (p->kind == ExprKind::Const && !p->sized) {
          throw UnsupportedConstruct("unsized constant in concatenation", sp);
        }
        parts.push_back(p);
        if (is_punct(",")) {
          next();
          continue;
        }
        break;
      }
      expect_punct("}");
      return with_span(make_concat(std::move(parts)), sp);
    }
    if (t.kind == Tok::Ident && !keywords().count(t.text) && !unsupported_keywords().count(t.text)) {
      Token name = next();
      if (is_punct("(")) throw UnsupportedConstruct("function call", span_of(name));
      return parse_select_suffix(name);
    }
    unsupported_or_syntax(t, "expression");
  }

  ExprPtr parse_number(const Token& t) {
    SourceSpan sp = span_of(t);
    auto q = t.text.find('\'');
    try {
      if (q == std::string::npos) {
        std::string digits = strip_underscores(t.text);
        BitVec v = BitVec::from_digits(std::max(32, static_cast<int>(digits.size()) * 4), 10, digits);
        int w = std::max(32, v.bit_length());
        return with_span(make_const(v.resized(w), false, 'd'), sp);
      }
      if (q == 0) throw UnsupportedConstruct("unsized based literal", sp);
      int width = std::stoi(strip_underscores(t.text.substr(0, q)));
      if (width < 1 || width > 65536) throw SyntaxError(t.line, t.col, "literal width >= 1");
      if (q + 1 >= t.text.size()) throw SyntaxError(t.line, t.col, "literal base");
      char base = static_cast<char>(std::tolower(static_cast<unsigned char>(t.text[q + 1])));
      std::string digits = t.text.substr(q + 2);
      for (char c : digits) {
        char lc = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        if (lc == 'x' || lc == 'z' || lc == '?') throw UnsupportedConstruct("four-state literal", sp);
      }
      int radix = base == 'b' ? 2 : base == 'h' ? 16 : base == 'd' ? 10 : 0;
      if (radix == 0) {
        if (base == 'o') throw UnsupportedConstruct("octal literal", sp);
        throw SyntaxError(t.line, t.col, "literal base b, h or d");
      }
      if (digits.empty()) throw SyntaxError(t.line, t.col, "literal digits");
      return with_span(make_const(BitVec::from_digits(width, radix, digits), true, base), sp);
    } catch (const std::out_of_range&) {
      throw SyntaxError(t.line, t.col, "literal value that fits its width");
    } catch (const std::invalid_argument&) {
      throw SyntaxError(t.line, t.col, "valid literal digits");
    }
  }

  std::vector<Token> toks_;
  std::size_t idx_ = 0;
  int last_line_ = 0;
};

// ---- semantic checks ------------------------------------------------------

struct Checker {
  const RtlModule& m;

  void check_ident(const std::string& name, const SourceSpan& sp) const {
    if (!m.declares(name)) {
      throw SyntaxError(sp.line, sp.col, "declared identifier (got '" + name + "')");
    }
  }

  void check_expr(const ExprPtr& e) const {
    if (!e) return;
    switch (e->kind) {
      case ExprKind::Ident:
        check_ident(e->name, e->span);
        break;
      case ExprKind::BitSelect:
      case ExprKind::PartSelect:
        check_ident(e->name, e->span);
        if (m.find_param(e->name)) throw UnsupportedConstruct("select on localparam", e->span);
        if (e->kind == ExprKind::PartSelect) {
          int w = m.signal_width(e->name).value_or(1);
          if (e->msb >= w) throw SyntaxError(e->span.line, e->span.col, "part select within range");
        }
        break;
      default:
        break;
    }
    for (const auto& o : e->operands) check_expr(o);
  }

  void check_target(const ExprPtr& lhs, bool procedural) const {
    check_expr(lhs);
    const std::string& n = lhs->name;
    if (m.find_param(n)) throw SyntaxError(lhs->span.line, lhs->span.col, "assignable net");
    if (const auto* p = m.find_port(n); p && p->direction == Direction::Input) {
      throw MultiDriverError(n, {p->span, lhs->span});
    }
    bool reg = m.is_reg(n);
    if (procedural && !reg) throw UnsupportedConstruct("procedural assignment to wire " + n, lhs->span);
    if (!procedural && reg) throw UnsupportedConstruct("continuous assignment to reg " + n, lhs->span);
  }

  void check_stmt(const StmtPtr& s, bool clocked) const {
    if (!s) return;
    switch (s->kind) {
      case StmtKind::Block:
        for (const auto& c : s->stmts) check_stmt(c, clocked);
        break;
      case StmtKind::If:
        check_expr(s->cond);
        check_stmt(s->then_s, clocked);
        check_stmt(s->else_s, clocked);
        break;
      case StmtKind::Case:
        check_expr(s->subject);
        for (const auto& a : s->arms) {
          for (const auto& l : a.labels) {
            bool constant = l->kind == ExprKind::Const ||
                            (l->kind == ExprKind::Ident && m.find_param(l->name));
            if (!constant) throw UnsupportedConstruct("non-constant case label", l->span);
            check_expr(l);
          }
          check_stmt(a.body, clocked);
        }
        break;
      case StmtKind::Assign:
        check_target(s->lhs, true);
        check_expr(s->rhs);
        if (clocked && !s->nonblocking) {
          throw UnsupportedConstruct("blocking assignment in clocked process", s->span);
        }
        if (!clocked && s->nonblocking) {
          throw UnsupportedConstruct("nonblocking assignment in combinational process", s->span);
        }
        break;
    }
  }

  void run() const {
    std::map<std::string, SourceSpan> seen;
    auto declare = [&](const std::string& n, const SourceSpan& sp) {
      if (seen.count(n)) throw SyntaxError(sp.line, sp.col, "unique name (duplicate '" + n + "')");
      seen[n] = sp;
    };
    for (const auto& p : m.ports) declare(p.name, p.span);
    for (const auto& n : m.nets) declare(n.name, n.span);
    for (const auto& g : m.params) {
      for (const auto& e : g.entries) declare(e.name, e.span);
    }
    for (const auto& a : m.assigns) {
      check_target(a.lhs, false);
      check_expr(a.rhs);
    }
    for (const auto& b : m.processes) {
      if (b.kind == AlwaysKind::Clocked) {
        check_ident(b.clock, b.span);
      } else {
        for (const auto& s : b.sensitivity) check_ident(s, b.span);
      }
      check_stmt(b.body, b.kind == AlwaysKind::Clocked);
    }
    for (const auto& inst : m.instances) {
      if (m.declares(inst.instance_name)) {
        throw SyntaxError(inst.span.line, inst.span.col, "unique instance name");
      }
      for (const auto& c : inst.connections) check_expr(c.expr);
    }
  }
};

std::vector<std::string> output_ports_of(const RtlDesign& d, const std::string& module) {
  if (const auto* prim = find_primitive(module)) return prim->outputs;
  std::vector<std::string> out;
  if (const auto* child = d.find_module(module)) {
    for (const auto& p : child->ports) {
      if (p.direction == Direction::Output) out.push_back(p.name);
    }
  }
  return out;
}

void check_drivers(const RtlDesign& d, const RtlModule& m) {
  std::map<std::string, std::vector<SourceSpan>> drivers;
  for (const auto& a : m.assigns) drivers[lhs_net(a.lhs)].push_back(a.span);
  for (const auto& b : m.processes) {
    std::vector<std::string> w;
    collect_writes(b.body, w);
    for (const auto& n : w) drivers[n].push_back(b.span);
  }
  for (const auto& inst : m.instances) {
    auto outs = output_ports_of(d, inst.module_name);
    for (const auto& c : inst.connections) {
      if (!c.expr || std::find(outs.begin(), outs.end(), c.port) == outs.end()) continue;
      if (c.expr->kind != ExprKind::Ident && c.expr->kind != ExprKind::BitSelect &&
          c.expr->kind != ExprKind::PartSelect) {
        throw UnsupportedConstruct("output port connected to an expression", c.span);
      }
      const std::string& n = c.expr->name;
      if (const auto* p = m.find_port(n); p && p->direction == Direction::Input) {
        throw MultiDriverError(n, {p->span, c.span});
      }
      if (m.is_reg(n)) throw UnsupportedConstruct("instance output driving reg " + n, c.span);
      drivers[n].push_back(c.span);
    }
  }
  for (const auto& [net, spans] : drivers) {
    if (spans.size() > 1) throw MultiDriverError(net, spans);
  }
}

}  // namespace

RtlDesign parse_verilog(std::string_view source, std::string source_name) {
  Lexer lexer(source);
  Parser parser(lexer.run());
  RtlDesign d = parser.parse_design();
  d.source_name = std::move(source_name);
  std::set<std::string> names;
  for (const auto& m : d.modules) {
    if (!names.insert(m.name).second) {
      throw SyntaxError(m.span.line, m.span.col, "unique module name (duplicate '" + m.name + "')");
    }
    Checker{m}.run();
  }
  for (const auto& m : d.modules) check_drivers(d, m);
  return d;
}

}  // namespace htkit::rtl
