#include "cbc/kernel/eval.hpp"
#include "cbc/kernel/print.hpp"
#include "cbc/kernel/syntax.hpp"
#include "cbc/traits/calculus.hpp"

namespace cbc::traits {

namespace {

bool all_values(const std::vector<Expr>& xs) {
  for (const auto& x : xs) {
    if (!is_value(x)) return false;
  }
  return true;
}

/// Index of the first non-value, or xs.size().
std::size_t first_open(const std::vector<Expr>& xs) {
  std::size_t i = 0;
  while (i < xs.size() && is_value(xs[i])) ++i;
  return i;
}

Expr compute(const Expr& e) {
  try {
    return to_expr(eval(e, Env{}));
  } catch (const EvalError& err) {
    throw StuckError("stuck at '" + print(e) + "': " + err.what());
  }
}

Expr invoke(const FlatTable& ds, const Expr& recv, const std::string& m, const std::vector<Expr>& args,
            const Expr& whole) {
  const auto* obj = recv.as<expr::New>();
  if (!obj) throw StuckError("stuck at '" + print(whole) + "': receiver is not an object");
  const FlatDecl* d = ds.find(obj->cls);
  if (!d) throw StuckError("stuck at '" + print(whole) + "': unknown class " + obj->cls);
  const Method* method = d->body.find(m);
  if (!method) throw StuckError("stuck at '" + print(whole) + "': " + obj->cls + " has no method " + m);
  if (method->params.size() != args.size()) {
    throw StuckError("stuck at '" + print(whole) + "': wrong number of arguments");
  }
  if (method->body) {
    std::vector<std::pair<std::string, Expr>> subst{{"this", recv}};
    for (std::size_t i = 0; i < args.size(); ++i) subst.emplace_back(method->params[i].name, args[i]);
    return substitute_all(*method->body, subst);
  }
  const auto getters = ds.getters(obj->cls);
  for (std::size_t i = 0; i < getters.size(); ++i) {
    if (getters[i]->name == m && i < obj->args.size()) return obj->args[i];
  }
  throw StuckError("stuck at '" + print(whole) + "': " + obj->cls + "." + m + " is abstract");
}

}  // namespace

bool is_value(const Expr& e) {
  if (e.is<expr::IntLit>() || e.is<expr::BoolLit>()) return true;
  if (const auto* s = e.as<expr::SeqLit>()) {
    for (const auto& x : s->elems) {
      if (!x.is<expr::IntLit>()) return false;
    }
    return true;
  }
  if (const auto* n = e.as<expr::New>()) return n->cls != "Nil" && n->cls != "Cons" && all_values(n->args);
  return false;
}

Expr step(const FlatTable& ds, const Expr& e) {
  if (is_value(e)) return e;
  return std::visit(
      [&](const auto& n) -> Expr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, expr::Binary>) {
          if (!is_value(n.lhs)) return binary(n.op, step(ds, n.lhs), n.rhs);
          if (n.op == BinOp::And || n.op == BinOp::Or) {
            const auto* b = n.lhs.template as<expr::BoolLit>();
            if (!b) throw StuckError("stuck at '" + print(e) + "': operand is not boolean");
            if (b->value == (n.op == BinOp::Or)) return n.lhs;
            return n.rhs;
          }
          if (!is_value(n.rhs)) return binary(n.op, n.lhs, step(ds, n.rhs));
          return compute(e);
        } else if constexpr (std::is_same_v<T, expr::Not>) {
          if (!is_value(n.inner)) return not_(step(ds, n.inner));
          return compute(e);
        } else if constexpr (std::is_same_v<T, expr::SeqLit>) {
          auto elems = n.elems;
          const std::size_t i = first_open(elems);
          if (i < elems.size() && !is_value(elems[i])) {
            elems[i] = step(ds, elems[i]);
            return seq_lit(std::move(elems));
          }
          return compute(e);
        } else if constexpr (std::is_same_v<T, expr::SeqOp>) {
          if (!is_value(n.receiver)) return seq_op(n.op, step(ds, n.receiver), n.arg);
          if (n.arg && !is_value(*n.arg)) return seq_op(n.op, n.receiver, step(ds, *n.arg));
          return compute(e);
        } else if constexpr (std::is_same_v<T, expr::Call>) {
          if (!is_value(n.receiver)) return call(step(ds, n.receiver), n.method, n.args);
          const std::size_t i = first_open(n.args);
          if (i < n.args.size()) {
            auto args = n.args;
            args[i] = step(ds, args[i]);
            return call(n.receiver, n.method, std::move(args));
          }
          return invoke(ds, n.receiver, n.method, n.args, e);
        } else if constexpr (std::is_same_v<T, expr::New>) {
          const std::size_t i = first_open(n.args);
          if (i < n.args.size()) {
            auto args = n.args;
            args[i] = step(ds, args[i]);
            return new_(n.cls, std::move(args));
          }
          return compute(e);
        } else if constexpr (std::is_same_v<T, expr::Ite>) {
          if (!is_value(n.cond)) return ite(step(ds, n.cond), n.then_branch, n.else_branch);
          const auto* b = n.cond.template as<expr::BoolLit>();
          if (!b) throw StuckError("stuck at '" + print(e) + "': condition is not boolean");
          return b->value ? n.then_branch : n.else_branch;
        } else {
          throw StuckError("stuck at '" + print(e) + "': not a closed expression");
        }
      },
      e.node().v);
}

Evaluation evaluate(const FlatTable& ds, const Expr& e, long fuel) {
  Evaluation out;
  Expr cur = e;
  while (!is_value(cur)) {
    if (out.steps >= fuel) throw FuelExhausted("no value after " + std::to_string(fuel) + " steps");
    cur = step(ds, cur);
    ++out.steps;
  }
  out.value = eval(cur, Env{});
  return out;
}

}  // namespace cbc::traits
