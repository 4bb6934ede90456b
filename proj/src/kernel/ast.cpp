#include "cbc/kernel/ast.hpp"

#include "cbc/kernel/syntax.hpp"

namespace cbc {

std::string to_string(const Type& t) {
  switch (t.kind) {
    case Type::Kind::Int: return "int";
    case Type::Kind::Bool: return "bool";
    case Type::Kind::Seq: return "List";
    case Type::Kind::Unit: return "void";
    case Type::Kind::Object: return t.cls;
  }
  return "?";
}

const char* to_string(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "div";
    case BinOp::Eq: return "==";
    case BinOp::Ne: return "!=";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
  }
  return "?";
}

const char* to_string(SeqOpKind op) {
  switch (op) {
    case SeqOpKind::Size: return "size";
    case SeqOpKind::Get: return "get";
    case SeqOpKind::Contains: return "contains";
    case SeqOpKind::Element: return "element";
    case SeqOpKind::Tail: return "tail";
  }
  return "?";
}

namespace {
template <class T>
Expr mk(T&& node) {
  return Expr(std::make_shared<const ExprNode>(ExprNode{std::forward<T>(node)}));
}
template <class T>
Predicate mkp(T&& node) {
  return Predicate(std::make_shared<const PredicateNode>(PredicateNode{std::forward<T>(node)}));
}
template <class T>
Statement mks(T&& node) {
  return Statement(std::make_shared<const StatementNode>(StatementNode{std::forward<T>(node)}));
}
}  // namespace

Expr::Expr() : Expr(bool_lit(true)) {}

bool Expr::operator==(const Expr& other) const {
  return node_ == other.node_ || *node_ == *other.node_;
}

Expr int_lit(std::int64_t v) { return mk(expr::IntLit{v}); }
Expr bool_lit(bool v) { return mk(expr::BoolLit{v}); }
Expr var(std::string name) { return mk(expr::Var{std::move(name)}); }
Expr old(std::string name) { return mk(expr::Old{std::move(name)}); }
Expr binary(BinOp op, Expr lhs, Expr rhs) {
  return mk(expr::Binary{op, std::move(lhs), std::move(rhs)});
}
Expr not_(Expr inner) { return mk(expr::Not{std::move(inner)}); }
Expr seq_lit(std::vector<Expr> elems) { return mk(expr::SeqLit{std::move(elems)}); }
Expr seq_op(SeqOpKind op, Expr receiver, std::optional<Expr> arg) {
  return mk(expr::SeqOp{op, std::move(receiver), std::move(arg)});
}
Expr call(Expr receiver, std::string method, std::vector<Expr> args) {
  return mk(expr::Call{std::move(receiver), std::move(method), std::move(args)});
}
Expr new_(std::string cls, std::vector<Expr> args) {
  return mk(expr::New{std::move(cls), std::move(args)});
}
Expr result() { return mk(expr::Result{}); }
Expr ite(Expr cond, Expr then_branch, Expr else_branch) {
  return mk(expr::Ite{std::move(cond), std::move(then_branch), std::move(else_branch)});
}

Predicate::Predicate() : Predicate(p_true()) {}

bool Predicate::operator==(const Predicate& other) const {
  return node_ == other.node_ || *node_ == *other.node_;
}

Predicate atom(Expr e) { return mkp(pred::Atom{std::move(e)}); }
Predicate p_true() {
  static const Predicate t = mkp(pred::True{});
  return t;
}
Predicate p_false() {
  static const Predicate f = mkp(pred::False{});
  return f;
}
Predicate p_not(Predicate p) { return mkp(pred::Not{std::move(p)}); }
Predicate implies(Predicate lhs, Predicate rhs) {
  if (lhs.is<pred::True>()) return rhs;
  return mkp(pred::Implies{std::move(lhs), std::move(rhs)});
}
Predicate forall(std::string var, BoundedDomain dom, Predicate body) {
  return mkp(pred::Forall{std::move(var), std::move(dom), std::move(body)});
}
Predicate exists(std::string var, BoundedDomain dom, Predicate body) {
  return mkp(pred::Exists{std::move(var), std::move(dom), std::move(body)});
}

Predicate conj(std::vector<Predicate> parts) {
  std::vector<Predicate> flat;
  for (auto& p : parts) {
    if (p.is<pred::True>()) continue;
    if (const auto* a = p.as<pred::And>()) {
      flat.insert(flat.end(), a->parts.begin(), a->parts.end());
    } else {
      flat.push_back(std::move(p));
    }
  }
  if (flat.empty()) return p_true();
  if (flat.size() == 1) return flat.front();
  return mkp(pred::And{std::move(flat)});
}

Predicate disj(std::vector<Predicate> parts) {
  std::vector<Predicate> flat;
  for (auto& p : parts) {
    if (p.is<pred::False>()) continue;
    if (const auto* o = p.as<pred::Or>()) {
      flat.insert(flat.end(), o->parts.begin(), o->parts.end());
    } else {
      flat.push_back(std::move(p));
    }
  }
  if (flat.empty()) return p_false();
  if (flat.size() == 1) return flat.front();
  return mkp(pred::Or{std::move(flat)});
}

Statement::Statement() : Statement(skip()) {}

bool Statement::operator==(const Statement& other) const {
  return node_ == other.node_ || *node_ == *other.node_;
}

Statement skip() {
  static const Statement s = mks(stmt::Skip{});
  return s;
}
Statement assign(std::string target, Expr value) {
  return mks(stmt::Assign{std::move(target), std::move(value)});
}
Statement seq(Statement first, Statement second) {
  return mks(stmt::Seq{std::move(first), std::move(second)});
}
Statement seq(std::vector<Statement> parts) {
  if (parts.empty()) return skip();
  Statement acc = parts.back();
  for (auto it = parts.rbegin() + 1; it != parts.rend(); ++it) acc = seq(*it, acc);
  return acc;
}
Statement select(std::vector<stmt::Branch> branches) {
  return mks(stmt::Select{std::move(branches)});
}
Statement repeat(Predicate invariant, Expr variant, Expr guard, Statement body) {
  return mks(stmt::Repeat{std::move(invariant), std::move(variant), std::move(guard),
                          std::move(body)});
}
Statement method_call(std::string method, std::vector<Expr> args, std::string target) {
  return mks(stmt::MethodCall{std::move(method), std::move(args), std::move(target)});
}
Statement abstract_stmt(std::string id) { return mks(stmt::Abstract{std::move(id)}); }
Statement block_ref(std::string name, Predicate pre, Predicate post) {
  return mks(stmt::BlockRef{std::move(name), std::move(pre), std::move(post)});
}
Statement local_decl(std::string name, Type type, Expr init) {
  return mks(stmt::LocalDecl{std::move(name), std::move(type), std::move(init)});
}

Contract make_contract(Predicate pre, Predicate post) {
  if (mentions_old(pre)) throw ContractError("precondition may not mention old(..)");
  if (mentions_result(pre)) throw ContractError("precondition may not mention result");
  return Contract{std::move(pre), std::move(post)};
}

}  // namespace cbc
