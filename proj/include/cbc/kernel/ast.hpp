#pragma once

// Immutable syntax trees shared by every module: expressions, contract
// predicates, guarded-command statements and contracts.
//
// Nodes are held through shared_ptr<const ...>, so copies are cheap and
// trees may be shared freely between threads.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cbc {

/// Value sorts understood by the evaluator and the prover. `Seq` is an
/// immutable integer sequence (the List of the listings); `Object` is a
/// trait-calculus class instance named by `cls`.
struct Type {
  enum class Kind { Int, Bool, Seq, Object, Unit };
  Kind kind = Kind::Int;
  std::string cls;

  static Type integer() { return {Kind::Int, {}}; }
  static Type boolean() { return {Kind::Bool, {}}; }
  static Type sequence() { return {Kind::Seq, {}}; }
  static Type unit() { return {Kind::Unit, {}}; }
  static Type object(std::string name) { return {Kind::Object, std::move(name)}; }

  bool operator==(const Type&) const = default;
};

std::string to_string(const Type& t);

enum class BinOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class SeqOpKind { Size, Get, Contains, Element, Tail };

const char* to_string(BinOp op);
const char* to_string(SeqOpKind op);

struct ExprNode;

class Expr {
 public:
  Expr();  // BoolLit(true)
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}

  const ExprNode& node() const { return *node_; }
  template <class T>
  const T* as() const;
  template <class T>
  bool is() const {
    return as<T>() != nullptr;
  }

  bool operator==(const Expr& other) const;

 private:
  std::shared_ptr<const ExprNode> node_;
};

namespace expr {
struct IntLit {
  std::int64_t value;
  bool operator==(const IntLit&) const = default;
};
struct BoolLit {
  bool value;
  bool operator==(const BoolLit&) const = default;
};
struct Var {
  std::string name;
  bool operator==(const Var&) const = default;
};
/// Pre-state value of a variable; only legal in postconditions.
struct Old {
  std::string name;
  bool operator==(const Old&) const = default;
};
struct Binary {
  BinOp op;
  Expr lhs;
  Expr rhs;
  bool operator==(const Binary&) const = default;
};
struct Not {
  Expr inner;
  bool operator==(const Not&) const = default;
};
struct SeqLit {
  std::vector<Expr> elems;
  bool operator==(const SeqLit&) const = default;
};
struct SeqOp {
  SeqOpKind op;
  Expr receiver;
  std::optional<Expr> arg;  // index for get, element for contains
  bool operator==(const SeqOp&) const = default;
};
struct Call {
  Expr receiver;
  std::string method;
  std::vector<Expr> args;
  bool operator==(const Call&) const = default;
};
struct New {
  std::string cls;
  std::vector<Expr> args;
  bool operator==(const New&) const = default;
};
struct Result {
  bool operator==(const Result&) const = default;
};
/// Conditional expression of trait method bodies (if/elseif/else).
struct Ite {
  Expr cond;
  Expr then_branch;
  Expr else_branch;
  bool operator==(const Ite&) const = default;
};
}  // namespace expr

struct ExprNode {
  std::variant<expr::IntLit, expr::BoolLit, expr::Var, expr::Old, expr::Binary,
               expr::Not, expr::SeqLit, expr::SeqOp, expr::Call, expr::New,
               expr::Result, expr::Ite>
      v;
  bool operator==(const ExprNode&) const = default;
};

template <class T>
const T* Expr::as() const {
  return std::get_if<T>(&node_->v);
}

// Expression constructors.
Expr int_lit(std::int64_t v);
Expr bool_lit(bool v);
Expr var(std::string name);
Expr old(std::string name);
Expr binary(BinOp op, Expr lhs, Expr rhs);
Expr not_(Expr inner);
Expr seq_lit(std::vector<Expr> elems);
Expr seq_op(SeqOpKind op, Expr receiver, std::optional<Expr> arg = std::nullopt);
Expr call(Expr receiver, std::string method, std::vector<Expr> args);
Expr new_(std::string cls, std::vector<Expr> args);
Expr result();
Expr ite(Expr cond, Expr then_branch, Expr else_branch);

struct PredicateNode;

class Predicate {
 public:
  Predicate();  // True
  explicit Predicate(std::shared_ptr<const PredicateNode> node) : node_(std::move(node)) {}

  const PredicateNode& node() const { return *node_; }
  template <class T>
  const T* as() const;
  template <class T>
  bool is() const {
    return as<T>() != nullptr;
  }

  bool operator==(const Predicate& other) const;

 private:
  std::shared_ptr<const PredicateNode> node_;
};

namespace domain {
/// Inclusive integer interval. Bounds are expressions so that ranges such
/// as [0, j - 1] can follow program variables; an empty range has lo > hi.
struct IntRange {
  Expr lo;
  Expr hi;
  bool operator==(const IntRange&) const = default;
};
struct SeqElems {
  Expr seq;
  bool operator==(const SeqElems&) const = default;
};
struct SeqIndices {
  Expr seq;
  bool operator==(const SeqIndices&) const = default;
};
/// Every value of a sort. For Int this is the "all integers" sentinel: the
/// bounded prover reads it as [-B, B], the SMT export as all of Int.
struct AllOf {
  Type type;
  bool operator==(const AllOf&) const = default;
};
}  // namespace domain

using BoundedDomain =
    std::variant<domain::IntRange, domain::SeqElems, domain::SeqIndices, domain::AllOf>;

namespace pred {
struct Atom {
  Expr expr;
  bool operator==(const Atom&) const = default;
};
struct And {
  std::vector<Predicate> parts;
  bool operator==(const And&) const = default;
};
struct Or {
  std::vector<Predicate> parts;
  bool operator==(const Or&) const = default;
};
struct Not {
  Predicate inner;
  bool operator==(const Not&) const = default;
};
struct Implies {
  Predicate lhs;
  Predicate rhs;
  bool operator==(const Implies&) const = default;
};
struct Forall {
  std::string var;
  BoundedDomain dom;
  Predicate body;
  bool operator==(const Forall&) const = default;
};
struct Exists {
  std::string var;
  BoundedDomain dom;
  Predicate body;
  bool operator==(const Exists&) const = default;
};
struct True {
  bool operator==(const True&) const = default;
};
struct False {
  bool operator==(const False&) const = default;
};
}  // namespace pred

struct PredicateNode {
  std::variant<pred::Atom, pred::And, pred::Or, pred::Not, pred::Implies, pred::Forall,
               pred::Exists, pred::True, pred::False>
      v;
  bool operator==(const PredicateNode&) const = default;
};

template <class T>
const T* Predicate::as() const {
  return std::get_if<T>(&node_->v);
}

Predicate atom(Expr e);
Predicate p_true();
Predicate p_false();
Predicate p_not(Predicate p);
Predicate implies(Predicate lhs, Predicate rhs);
Predicate forall(std::string var, BoundedDomain dom, Predicate body);
Predicate exists(std::string var, BoundedDomain dom, Predicate body);
/// Conjunction that drops `true` parts, flattens nested conjunctions and
/// collapses to the single part or `true` where possible.
Predicate conj(std::vector<Predicate> parts);
Predicate disj(std::vector<Predicate> parts);

struct StatementNode;

class Statement {
 public:
  Statement();  // Skip
  explicit Statement(std::shared_ptr<const StatementNode> node) : node_(std::move(node)) {}

  const StatementNode& node() const { return *node_; }
  template <class T>
  const T* as() const;
  template <class T>
  bool is() const {
    return as<T>() != nullptr;
  }

  bool operator==(const Statement& other) const;

 private:
  std::shared_ptr<const StatementNode> node_;
};

namespace stmt {
struct Skip {
  bool operator==(const Skip&) const = default;
};
struct Assign {
  std::string target;
  Expr value;
  bool operator==(const Assign&) const = default;
};
struct Seq {
  Statement first;
  Statement second;
  bool operator==(const Seq&) const = default;
};
struct Branch {
  Expr guard;
  Statement body;
  bool operator==(const Branch&) const = default;
};
struct Select {
  std::vector<Branch> branches;
  bool operator==(const Select&) const = default;
};
struct Repeat {
  Predicate invariant;
  Expr variant;
  Expr guard;
  Statement body;
  bool operator==(const Repeat&) const = default;
};
struct MethodCall {
  std::string method;
  std::vector<Expr> args;
  std::string target;
  bool operator==(const MethodCall&) const = default;
};
struct Abstract {
  std::string id;
  bool operator==(const Abstract&) const = default;
};
struct BlockRef {
  std::string name;
  Predicate pre;
  Predicate post;
  bool operator==(const BlockRef&) const = default;
};
struct LocalDecl {
  std::string name;
  Type type;
  Expr init;
  bool operator==(const LocalDecl&) const = default;
};
}  // namespace stmt

struct StatementNode {
  std::variant<stmt::Skip, stmt::Assign, stmt::Seq, stmt::Select, stmt::Repeat,
               stmt::MethodCall, stmt::Abstract, stmt::BlockRef, stmt::LocalDecl>
      v;
  bool operator==(const StatementNode&) const = default;
};

template <class T>
const T* Statement::as() const {
  return std::get_if<T>(&node_->v);
}

Statement skip();
Statement assign(std::string target, Expr value);
Statement seq(Statement first, Statement second);
/// Right-nested sequence of the given statements; skip when empty.
Statement seq(std::vector<Statement> parts);
Statement select(std::vector<stmt::Branch> branches);
Statement repeat(Predicate invariant, Expr variant, Expr guard, Statement body);
Statement method_call(std::string method, std::vector<Expr> args, std::string target);
Statement abstract_stmt(std::string id);
Statement block_ref(std::string name, Predicate pre, Predicate post);
Statement local_decl(std::string name, Type type, Expr init);

struct Contract {
  Predicate pre;
  Predicate post;
  bool operator==(const Contract&) const = default;
};

/// Throws ContractError when `pre` mentions old(..) or result.
Contract make_contract(Predicate pre, Predicate post);

struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace cbc
