#include "cbc/kernel/typing.hpp"

#include "cbc/kernel/print.hpp"

namespace cbc {

namespace {

Type expect_kind(const Expr& e, const TypeEnv& env, Type::Kind k, const char* what) {
  const Type t = type_of(e, env);
  if (t.kind != k) {
    throw TypeError("expected " + std::string(what) + " in '" + print(e) + "', found " +
                    to_string(t));
  }
  return t;
}

Type lookup(const std::string& name, const TypeEnv& env) {
  const auto it = env.find(name);
  if (it == env.end()) throw TypeError("undeclared variable '" + name + "'");
  return it->second;
}

}  // namespace

Type type_of(const Expr& e, const TypeEnv& env) {
  return std::visit(
      [&](const auto& n) -> Type {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, expr::IntLit>) {
          return Type::integer();
        } else if constexpr (std::is_same_v<T, expr::BoolLit>) {
          return Type::boolean();
        } else if constexpr (std::is_same_v<T, expr::Var> || std::is_same_v<T, expr::Old>) {
          return lookup(n.name, env);
        } else if constexpr (std::is_same_v<T, expr::Result>) {
          return lookup("result", env);
        } else if constexpr (std::is_same_v<T, expr::Binary>) {
          switch (n.op) {
            case BinOp::Add:
            case BinOp::Sub:
            case BinOp::Mul:
            case BinOp::Div:
              expect_kind(n.lhs, env, Type::Kind::Int, "an integer");
              expect_kind(n.rhs, env, Type::Kind::Int, "an integer");
              return Type::integer();
            case BinOp::Lt:
            case BinOp::Le:
            case BinOp::Gt:
            case BinOp::Ge:
              expect_kind(n.lhs, env, Type::Kind::Int, "an integer");
              expect_kind(n.rhs, env, Type::Kind::Int, "an integer");
              return Type::boolean();
            case BinOp::And:
            case BinOp::Or:
              expect_kind(n.lhs, env, Type::Kind::Bool, "a boolean");
              expect_kind(n.rhs, env, Type::Kind::Bool, "a boolean");
              return Type::boolean();
            case BinOp::Eq:
            case BinOp::Ne: {
              const Type a = type_of(n.lhs, env);
              const Type b = type_of(n.rhs, env);
              if (!(a == b)) {
                throw TypeError("comparison of " + to_string(a) + " with " + to_string(b) +
                                " in '" + print(e) + "'");
              }
              return Type::boolean();
            }
          }
          throw TypeError("unknown operator");
        } else if constexpr (std::is_same_v<T, expr::Not>) {
          expect_kind(n.inner, env, Type::Kind::Bool, "a boolean");
          return Type::boolean();
        } else if constexpr (std::is_same_v<T, expr::SeqLit>) {
          for (const auto& x : n.elems) expect_kind(x, env, Type::Kind::Int, "an integer");
          return Type::sequence();
        } else if constexpr (std::is_same_v<T, expr::SeqOp>) {
          expect_kind(n.receiver, env, Type::Kind::Seq, "a list");
          switch (n.op) {
            case SeqOpKind::Size:
            case SeqOpKind::Element: return Type::integer();
            case SeqOpKind::Tail: return Type::sequence();
            case SeqOpKind::Get:
              expect_kind(*n.arg, env, Type::Kind::Int, "an integer");
              return Type::integer();
            case SeqOpKind::Contains:
              expect_kind(*n.arg, env, Type::Kind::Int, "an integer");
              return Type::boolean();
          }
          throw TypeError("unknown list operation");
        } else if constexpr (std::is_same_v<T, expr::Call>) {
          throw TypeError("cannot type the call '" + print(e) + "'");
        } else if constexpr (std::is_same_v<T, expr::New>) {
          if (n.cls == "Nil" || n.cls == "Cons") return Type::sequence();
          return Type::object(n.cls);
        } else {
          expect_kind(n.cond, env, Type::Kind::Bool, "a boolean");
          const Type a = type_of(n.then_branch, env);
          const Type b = type_of(n.else_branch, env);
          if (!(a == b)) throw TypeError("branches of '" + print(e) + "' differ in sort");
          return a;
        }
      },
      e.node().v);
}

void check_predicate(const Predicate& p, const TypeEnv& env) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, pred::Atom>) {
          expect_kind(n.expr, env, Type::Kind::Bool, "a boolean");
        } else if constexpr (std::is_same_v<T, pred::And> || std::is_same_v<T, pred::Or>) {
          for (const auto& x : n.parts) check_predicate(x, env);
        } else if constexpr (std::is_same_v<T, pred::Not>) {
          check_predicate(n.inner, env);
        } else if constexpr (std::is_same_v<T, pred::Implies>) {
          check_predicate(n.lhs, env);
          check_predicate(n.rhs, env);
        } else if constexpr (std::is_same_v<T, pred::Forall> || std::is_same_v<T, pred::Exists>) {
          Type bound = Type::integer();
          if (const auto* r = std::get_if<domain::IntRange>(&n.dom)) {
            expect_kind(r->lo, env, Type::Kind::Int, "an integer");
            expect_kind(r->hi, env, Type::Kind::Int, "an integer");
          } else if (const auto* el = std::get_if<domain::SeqElems>(&n.dom)) {
            expect_kind(el->seq, env, Type::Kind::Seq, "a list");
          } else if (const auto* ix = std::get_if<domain::SeqIndices>(&n.dom)) {
            expect_kind(ix->seq, env, Type::Kind::Seq, "a list");
          } else {
            bound = std::get<domain::AllOf>(n.dom).type;
          }
          TypeEnv inner = env;
          inner[n.var] = bound;
          check_predicate(n.body, inner);
        }
      },
      p.node().v);
}

}  // namespace cbc
