#include "cbc/kernel/parser.hpp"

#include <array>
#include <cctype>

#include "cbc/kernel/print.hpp"

namespace cbc {

ParseError::ParseError(const std::string& f, int l, int c, const std::string& msg)
    : std::runtime_error((f.empty() ? std::string("<input>") : f) + ":" + std::to_string(l) +
                         ":" + std::to_string(c) + ": " + msg),
      file(f),
      line(l),
      col(c) {}

namespace {

constexpr std::array<std::string_view, 16> kPuncts = {
    "==>", "==", "!=", "<=", ">=", ":=", "&&", "||", "->", "<", ">", "=", "!", "&", "|", "-"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

bool is_seq_op(const std::string& name, SeqOpKind& out) {
  static const std::array<std::pair<std::string_view, SeqOpKind>, 5> ops = {{
      {"size", SeqOpKind::Size},
      {"get", SeqOpKind::Get},
      {"contains", SeqOpKind::Contains},
      {"element", SeqOpKind::Element},
      {"tail", SeqOpKind::Tail},
  }};
  for (const auto& [n, k] : ops) {
    if (n == name) {
      out = k;
      return true;
    }
  }
  return false;
}

bool is_type_keyword(const std::string& s) {
  return s == "int" || s == "bool" || s == "List" || s == "Num" || s == "Bool";
}

Predicate lift(const Expr& e) {
  if (const auto* b = e.as<expr::BoolLit>()) return b->value ? p_true() : p_false();
  return atom(e);
}

}  // namespace

std::vector<Token> tokenize(std::string_view src, const std::string& file) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else if ((static_cast<unsigned char>(src[i]) & 0xC0) != 0x80) {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.substr(i, 2) == "/*") {
      const int l0 = line, c0 = col;
      const auto end = src.find("*/", i + 2);
      if (end == std::string_view::npos) throw ParseError(file, l0, c0, "unterminated comment");
      advance(end + 2 - i);
      continue;
    }
    Token t;
    t.line = line;
    t.col = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.kind = Token::Kind::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Token::Kind::Int;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (c == '@') {
      // Annotation keywords of .trait files: @Pre, @Post, @Decreases.
      std::size_t j = i + 1;
      while (j < src.size() && ident_char(src[j])) ++j;
      t.kind = Token::Kind::Punct;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else {
      std::string_view match;
      for (auto p : kPuncts) {
        if (src.substr(i, p.size()) == p) {
          match = p;
          break;
        }
      }
      if (match.empty()) {
        if (std::string_view("()[]{},;:.+*/").find(c) == std::string_view::npos) {
          throw ParseError(file, line, col, std::string("unexpected character '") + c + "'");
        }
        match = src.substr(i, 1);
      }
      t.kind = Token::Kind::Punct;
      t.text = std::string(match);
      advance(match.size());
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Token::Kind::End;
  end.line = line;
  end.col = col;
  out.push_back(end);
  return out;
}

Type type_from_name(const std::string& name) {
  if (name == "int" || name == "Num") return Type::integer();
  if (name == "bool" || name == "Bool") return Type::boolean();
  if (name == "List" || name == "Cons" || name == "Nil") return Type::sequence();
  if (name == "void") return Type::unit();
  return Type::object(name);
}

Parser::Parser(std::string_view src, std::string file)
    : toks_(tokenize(src, file)), file_(std::move(file)) {}

const Token& Parser::peek(std::size_t ahead) const {
  const auto k = std::min(pos_ + ahead, toks_.size() - 1);
  return toks_[k];
}

bool Parser::at(std::string_view text, std::size_t ahead) const {
  const Token& t = peek(ahead);
  return t.kind != Token::Kind::End && t.kind != Token::Kind::Int && t.text == text;
}

bool Parser::at_end() const { return peek().kind == Token::Kind::End; }

bool Parser::accept(std::string_view text) {
  if (!at(text)) return false;
  ++pos_;
  return true;
}

void Parser::expect(std::string_view text) {
  if (!accept(text)) {
    const Token& t = peek();
    fail("expected '" + std::string(text) + "' but found " +
         (t.kind == Token::Kind::End ? std::string("end of input") : "'" + t.text + "'"));
  }
}

std::string Parser::ident() {
  const Token& t = peek();
  if (t.kind != Token::Kind::Ident) fail("expected identifier");
  ++pos_;
  return t.text;
}

std::int64_t Parser::integer() {
  const Token& t = peek();
  if (t.kind != Token::Kind::Int) fail("expected integer literal");
  ++pos_;
  try {
    return std::stoll(t.text);
  } catch (const std::out_of_range&) {
    fail_at(t, "integer literal out of range");
  }
}

std::vector<std::string> Parser::ident_list() {
  std::vector<std::string> out;
  out.push_back(ident());
  while (accept(",")) out.push_back(ident());
  return out;
}

void Parser::fail(const std::string& msg) const { fail_at(peek(), msg); }

void Parser::fail_at(const Token& t, const std::string& msg) const {
  throw ParseError(file_, t.line, t.col, msg);
}

Type Parser::type() { return type_from_name(ident()); }

// ---------------------------------------------------------------- expressions

Expr Parser::expr() { return ite(); }

Expr Parser::ite() {
  if (!at("if")) return or_expr();
  expect("if");
  expect("(");
  Expr c = expr();
  expect(")");
  expect("{");
  Expr a = expr();
  expect("}");
  std::vector<std::pair<Expr, Expr>> arms{{c, a}};
  for (;;) {
    if (accept("elseif") || (at("else") && at("if", 1) && (accept("else"), accept("if")))) {
      expect("(");
      Expr ci = expr();
      expect(")");
      expect("{");
      Expr ai = expr();
      expect("}");
      arms.emplace_back(ci, ai);
      continue;
    }
    break;
  }
  expect("else");
  expect("{");
  Expr out = expr();
  expect("}");
  for (auto it = arms.rbegin(); it != arms.rend(); ++it) out = cbc::ite(it->first, it->second, out);
  return out;
}

Expr Parser::or_expr() {
  Expr lhs = and_expr();
  while (accept("||")) lhs = binary(BinOp::Or, lhs, and_expr());
  return lhs;
}

Expr Parser::and_expr() {
  Expr lhs = eq_expr();
  while (accept("&&") || accept("&")) lhs = binary(BinOp::And, lhs, eq_expr());
  return lhs;
}

Expr Parser::eq_expr() {
  Expr lhs = rel_expr();
  if (accept("==")) return binary(BinOp::Eq, lhs, rel_expr());
  if (accept("!=")) return binary(BinOp::Ne, lhs, rel_expr());
  return lhs;
}

Expr Parser::rel_expr() {
  Expr lhs = add_expr();
  static const std::array<std::pair<std::string_view, BinOp>, 4> ops = {
      {{"<", BinOp::Lt}, {"<=", BinOp::Le}, {">", BinOp::Gt}, {">=", BinOp::Ge}}};
  for (const auto& [t, op] : ops) {
    if (accept(t)) return binary(op, lhs, add_expr());
  }
  return lhs;
}

Expr Parser::add_expr() {
  Expr lhs = mul_expr();
  for (;;) {
    if (accept("+")) {
      lhs = binary(BinOp::Add, lhs, mul_expr());
    } else if (accept("-")) {
      lhs = binary(BinOp::Sub, lhs, mul_expr());
    } else {
      return lhs;
    }
  }
}

Expr Parser::mul_expr() {
  Expr lhs = unary();
  for (;;) {
    if (accept("*")) {
      lhs = binary(BinOp::Mul, lhs, unary());
    } else if (accept("/") || accept("div")) {
      lhs = binary(BinOp::Div, lhs, unary());
    } else {
      return lhs;
    }
  }
}

Expr Parser::unary() {
  if (accept("!")) return not_(unary());
  if (accept("-")) {
    if (peek().kind == Token::Kind::Int) return int_lit(-integer());
    return binary(BinOp::Sub, int_lit(0), unary());
  }
  return postfix();
}

std::vector<Expr> Parser::args() {
  std::vector<Expr> out;
  expect("(");
  if (!accept(")")) {
    out.push_back(expr());
    while (accept(",")) out.push_back(expr());
    expect(")");
  }
  return out;
}

Expr Parser::postfix() {
  Expr e = primary();
  while (accept(".")) {
    const Token name_tok = peek();
    const std::string name = ident();
    std::vector<Expr> as = args();
    SeqOpKind k{};
    if (is_seq_op(name, k)) {
      const bool wants_arg = k == SeqOpKind::Get || k == SeqOpKind::Contains;
      if (as.size() != (wants_arg ? 1u : 0u)) {
        fail_at(name_tok, "wrong number of arguments to " + name);
      }
      e = seq_op(k, e, wants_arg ? std::optional<Expr>(as[0]) : std::nullopt);
    } else {
      e = call(e, name, std::move(as));
    }
  }
  return e;
}

Expr Parser::primary() {
  const Token t = peek();
  if (t.kind == Token::Kind::Int) return int_lit(integer());
  if (accept("(")) {
    Expr e = expr();
    expect(")");
    return e;
  }
  if (accept("[")) {
    std::vector<Expr> elems;
    if (!accept("]")) {
      elems.push_back(expr());
      while (accept(",")) elems.push_back(expr());
      expect("]");
    }
    return seq_lit(std::move(elems));
  }
  if (t.kind != Token::Kind::Ident) fail("expected expression");
  if (accept("true")) return bool_lit(true);
  if (accept("false")) return bool_lit(false);
  if (accept("result")) return result();
  if (accept("old")) {
    expect("(");
    std::string n = ident();
    expect(")");
    return old(std::move(n));
  }
  if (accept("new")) {
    std::string cls = ident();
    return new_(std::move(cls), args());
  }
  if (t.text == "forall" || t.text == "exists" || t.text == "if") fail("expected expression");
  std::string name = ident();
  if (at("(")) {
    if (!implicit_this) fail_at(t, "call to '" + name + "' needs a receiver");
    return call(var("this"), std::move(name), args());
  }
  return var(std::move(name));
}

// ---------------------------------------------------------------- predicates

Predicate Parser::predicate() { return implication(); }

Predicate Parser::implication() {
  Predicate lhs = disjunction();
  if (accept("==>")) return implies(lhs, implication());
  return lhs;
}

Predicate Parser::disjunction() {
  std::vector<Predicate> parts{conjunction()};
  while (accept("||")) parts.push_back(conjunction());
  return parts.size() == 1 ? parts[0] : disj(std::move(parts));
}

Predicate Parser::conjunction() {
  std::vector<Predicate> parts{unit()};
  while (accept("&&") || accept("&")) parts.push_back(unit());
  return parts.size() == 1 ? parts[0] : conj(std::move(parts));
}

Predicate Parser::unit() {
  if (at("forall") || at("exists")) return quantifier();
  const std::size_t save = pos_;
  try {
    return lift(eq_expr());
  } catch (const ParseError&) {
    pos_ = save;
  }
  if (accept("!")) return p_not(unit());
  if (accept("(")) {
    Predicate p = predicate();
    expect(")");
    return p;
  }
  // Re-raise the expression error for a useful message.
  return lift(eq_expr());
}

Predicate Parser::quantifier() {
  const bool universal = accept("forall");
  if (!universal) expect("exists");
  std::string v;
  BoundedDomain dom;
  if (peek().kind == Token::Kind::Ident && peek(1).kind == Token::Kind::Ident &&
      !at("in", 1)) {
    // Typed binder: forall Num n: P
    const Type ty = type();
    v = ident();
    dom = domain::AllOf{ty};
  } else {
    v = ident();
    expect("in");
    dom = domain();
  }
  expect(":");
  Predicate body = predicate();
  return universal ? forall(v, dom, body) : exists(v, dom, body);
}

BoundedDomain Parser::domain() {
  if (accept("[")) {
    Expr lo = expr();
    expect(",");
    Expr hi = expr();
    expect("]");
    return domain::IntRange{lo, hi};
  }
  if (accept("elems")) {
    expect("(");
    Expr s = expr();
    expect(")");
    return domain::SeqElems{s};
  }
  if (accept("indices")) {
    expect("(");
    Expr s = expr();
    expect(")");
    return domain::SeqIndices{s};
  }
  if (peek().kind == Token::Kind::Ident && is_type_keyword(peek().text)) {
    return domain::AllOf{type()};
  }
  fail("expected quantifier domain");
}

// ---------------------------------------------------------------- statements

Statement Parser::statements() {
  std::vector<Statement> parts;
  while (!at_end() && !at("}")) parts.push_back(statement());
  return seq(std::move(parts));
}

Statement Parser::block_body() {
  expect("{");
  Statement s = statements();
  expect("}");
  return s;
}

Statement Parser::statement() {
  const Token t = peek();
  if (accept("skip")) {
    expect(";");
    return skip();
  }
  if (at("if")) return if_statement();
  if (at("{")) return block_body();
  if (accept("while")) {
    expect("(");
    Expr g = expr();
    expect(")");
    if (!accept("invariant")) fail("loop requires an invariant annotation");
    Predicate inv = predicate();
    if (!accept("decreases")) fail("loop requires a decreases annotation");
    Expr v = expr();
    Statement body = block_body();
    return repeat(inv, v, g, body);
  }
  if (accept("block")) {
    BlockFrameDecl f;
    f.name = ident();
    expect("requires");
    f.pre = predicate();
    expect("ensures");
    f.post = predicate();
    if (accept("accessible")) f.accessible = ident_list();
    if (accept("assignable")) f.assignable = ident_list();
    expect(";");
    frames.push_back(f);
    return block_ref(f.name, f.pre, f.post);
  }
  if (accept("return")) {
    Expr value = expr();
    expect(";");
    return assign("result", value);
  }
  if (t.kind != Token::Kind::Ident) fail("expected statement");
  if (peek(1).kind == Token::Kind::Ident && (at(":=", 2) || at("=", 2))) {
    const Type ty = type();
    std::string name = ident();
    if (!accept(":=")) expect("=");
    Expr init = expr();
    expect(";");
    return local_decl(std::move(name), ty, init);
  }
  std::string target = ident();
  if (!accept(":=")) expect("=");
  if (peek().kind == Token::Kind::Ident && at("(", 1) && !at("old") && !at("new")) {
    std::string m = ident();
    std::vector<Expr> as = args();
    expect(";");
    return method_call(std::move(m), std::move(as), std::move(target));
  }
  Expr value = expr();
  expect(";");
  return assign(std::move(target), value);
}

Statement Parser::if_statement() {
  expect("if");
  if (at("[") && at("]", 1)) {
    std::vector<stmt::Branch> branches;
    while (at("[") && at("]", 1)) {
      accept("[");
      accept("]");
      Expr g = expr();
      expect("->");
      branches.push_back({g, block_body()});
    }
    expect("fi");
    return select(std::move(branches));
  }
  std::vector<Expr> conds;
  std::vector<Statement> bodies;
  expect("(");
  conds.push_back(expr());
  expect(")");
  bodies.push_back(block_body());
  Statement otherwise = skip();
  for (;;) {
    if (accept("elseif") || (at("else") && at("if", 1) && (accept("else"), accept("if")))) {
      expect("(");
      conds.push_back(expr());
      expect(")");
      bodies.push_back(block_body());
      continue;
    }
    if (accept("else")) otherwise = block_body();
    break;
  }
  bodies.push_back(otherwise);
  const auto guards = chain_guards(conds, true);
  std::vector<stmt::Branch> branches;
  for (std::size_t i = 0; i < guards.size(); ++i) branches.push_back({guards[i], bodies[i]});
  return select(std::move(branches));
}

Expr parse_expr(std::string_view src) {
  Parser p(src);
  Expr e = p.expr();
  if (!p.at_end()) p.fail("trailing input");
  return e;
}

Predicate parse_predicate(std::string_view src) {
  Parser p(src);
  Predicate e = p.predicate();
  if (!p.at_end()) p.fail("trailing input");
  return e;
}

Statement parse_statement(std::string_view src) {
  Parser p(src);
  Statement s = p.statements();
  if (!p.at_end()) p.fail("trailing input");
  return s;
}

}  // namespace cbc
