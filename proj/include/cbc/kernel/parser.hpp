#pragma once

// Concrete syntax shared by .cbc scripts, block instantiations, .trait and
// .tc files. Higher-level file parsers drive a Parser over one token stream.

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cbc/kernel/ast.hpp"

namespace cbc {

struct ParseError : std::runtime_error {
  ParseError(const std::string& file, int line, int col, const std::string& msg);
  std::string file;
  int line = 0;
  int col = 0;
};

struct Token {
  enum class Kind { Ident, Int, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 1;
  int col = 1;
};

std::vector<Token> tokenize(std::string_view src, const std::string& file = "");

/// Nested `block B requires P ensures Q accessible xs assignable ys;`
/// statement together with its frame.
struct BlockFrameDecl {
  std::string name;
  Predicate pre;
  Predicate post;
  std::vector<std::string> accessible;
  std::vector<std::string> assignable;
};

/// `int`/`Num` -> Int, `bool`/`Bool` -> Bool, `List`/`Cons`/`Nil` -> Seq,
/// anything else an object of that class.
Type type_from_name(const std::string& name);

class Parser {
 public:
  explicit Parser(std::string_view src, std::string file = "");

  /// In trait bodies a bare call f(x) means this.f(x).
  bool implicit_this = false;

  Expr expr();
  Predicate predicate();
  /// Statements up to (not including) a closing `}` or end of input.
  Statement statements();
  Statement statement();
  Type type();

  /// Block frames met by statement() so far, in source order.
  std::vector<BlockFrameDecl> frames;

  const Token& peek(std::size_t ahead = 0) const;
  bool at(std::string_view text, std::size_t ahead = 0) const;
  bool at_end() const;
  bool accept(std::string_view text);
  void expect(std::string_view text);
  std::string ident();
  std::int64_t integer();
  std::vector<std::string> ident_list();
  [[noreturn]] void fail(const std::string& msg) const;
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const;

 private:
  Expr ite();
  Expr or_expr();
  Expr and_expr();
  Expr eq_expr();
  Expr rel_expr();
  Expr add_expr();
  Expr mul_expr();
  Expr unary();
  Expr postfix();
  Expr primary();
  std::vector<Expr> args();

  Predicate implication();
  Predicate disjunction();
  Predicate conjunction();
  Predicate unit();
  Predicate quantifier();
  BoundedDomain domain();

  Statement block_body();
  Statement if_statement();

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::string file_;
};

Expr parse_expr(std::string_view src);
Predicate parse_predicate(std::string_view src);
Statement parse_statement(std::string_view src);

}  // namespace cbc
