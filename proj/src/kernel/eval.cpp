#include "cbc/kernel/eval.hpp"

#include <limits>

namespace cbc {

const Value* Env::find(std::string_view name) const {
  for (auto it = slots_.rbegin(); it != slots_.rend(); ++it) {
    if (it->first == name) return &it->second;
  }
  return nullptr;
}

Value& Env::set(const std::string& name, Value v) {
  for (auto it = slots_.rbegin(); it != slots_.rend(); ++it) {
    if (it->first == name) {
      it->second = std::move(v);
      return it->second;
    }
  }
  slots_.emplace_back(name, std::move(v));
  return slots_.back().second;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw EvalError("integer overflow");
  return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw EvalError("integer overflow");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw EvalError("integer overflow");
  return r;
}

std::int64_t euclid_div(std::int64_t a, std::int64_t b) {
  if (b == 0) throw EvalError("division by zero");
  if (a == std::numeric_limits<std::int64_t>::min() && b == -1) throw EvalError("integer overflow");
  std::int64_t q = a / b;
  const std::int64_t r = a % b;
  if (r < 0) q += b > 0 ? -1 : 1;
  return q;
}

namespace {

std::int64_t as_int(const Value& v) {
  if (v.kind != Type::Kind::Int) throw EvalError("expected an integer, got " + to_string(v));
  return v.i;
}

bool as_bool(const Value& v) {
  if (v.kind != Type::Kind::Bool) throw EvalError("expected a boolean, got " + to_string(v));
  return v.b;
}

const std::vector<std::int64_t>& as_seq(const Value& v) {
  if (v.kind != Type::Kind::Seq) throw EvalError("expected a list, got " + to_string(v));
  return v.seq;
}

Value eval_seq_op(const expr::SeqOp& n, const Env& env, const EvalContext& ctx) {
  const Value recv = eval(n.receiver, env, ctx);
  const auto& s = as_seq(recv);
  switch (n.op) {
    case SeqOpKind::Size: return Value::integer(static_cast<std::int64_t>(s.size()));
    case SeqOpKind::Get: {
      const auto i = as_int(eval(*n.arg, env, ctx));
      if (i < 0 || i >= static_cast<std::int64_t>(s.size())) {
        throw EvalError("get(" + std::to_string(i) + ") out of range");
      }
      return Value::integer(s[static_cast<std::size_t>(i)]);
    }
    case SeqOpKind::Contains: {
      const Value x = eval(*n.arg, env, ctx);
      if (x.kind != Type::Kind::Int) return Value::boolean(false);
      for (auto e : s) {
        if (e == x.i) return Value::boolean(true);
      }
      return Value::boolean(false);
    }
    case SeqOpKind::Element:
      if (s.empty()) throw EvalError("element() of an empty list");
      return Value::integer(s.front());
    case SeqOpKind::Tail:
      if (s.empty()) throw EvalError("tail() of an empty list");
      return Value::sequence(std::vector<std::int64_t>(s.begin() + 1, s.end()));
  }
  throw EvalError("unknown list operation");
}

Value eval_binary(const expr::Binary& n, const Env& env, const EvalContext& ctx) {
  if (n.op == BinOp::And) {
    if (!as_bool(eval(n.lhs, env, ctx))) return Value::boolean(false);
    return Value::boolean(as_bool(eval(n.rhs, env, ctx)));
  }
  if (n.op == BinOp::Or) {
    if (as_bool(eval(n.lhs, env, ctx))) return Value::boolean(true);
    return Value::boolean(as_bool(eval(n.rhs, env, ctx)));
  }
  const Value a = eval(n.lhs, env, ctx);
  const Value b = eval(n.rhs, env, ctx);
  switch (n.op) {
    case BinOp::Eq:
    case BinOp::Ne: {
      if (a.kind != b.kind) throw EvalError("comparison of values of different sorts");
      return Value::boolean((a == b) == (n.op == BinOp::Eq));
    }
    case BinOp::Add: return Value::integer(checked_add(as_int(a), as_int(b)));
    case BinOp::Sub: return Value::integer(checked_sub(as_int(a), as_int(b)));
    case BinOp::Mul: return Value::integer(checked_mul(as_int(a), as_int(b)));
    case BinOp::Div: return Value::integer(euclid_div(as_int(a), as_int(b)));
    case BinOp::Lt: return Value::boolean(as_int(a) < as_int(b));
    case BinOp::Le: return Value::boolean(as_int(a) <= as_int(b));
    case BinOp::Gt: return Value::boolean(as_int(a) > as_int(b));
    case BinOp::Ge: return Value::boolean(as_int(a) >= as_int(b));
    default: break;
  }
  throw EvalError("unknown operator");
}

Value lookup(const Env& env, const std::string& name) {
  const Value* v = env.find(name);
  if (!v) throw EvalError("unbound variable '" + name + "'");
  return *v;
}

std::vector<Value> domain_values(const BoundedDomain& d, const Env& env, const EvalContext& ctx) {
  std::vector<Value> out;
  if (const auto* r = std::get_if<domain::IntRange>(&d)) {
    const auto lo = as_int(eval(r->lo, env, ctx));
    const auto hi = as_int(eval(r->hi, env, ctx));
    if (hi >= lo && hi - lo > 100000) throw EvalError("quantifier range too large");
    for (auto k = lo; k <= hi; ++k) out.push_back(Value::integer(k));
  } else if (const auto* e = std::get_if<domain::SeqElems>(&d)) {
    const Value seq = eval(e->seq, env, ctx);
    for (auto x : as_seq(seq)) out.push_back(Value::integer(x));
  } else if (const auto* ix = std::get_if<domain::SeqIndices>(&d)) {
    const auto n = as_seq(eval(ix->seq, env, ctx)).size();
    for (std::size_t k = 0; k < n; ++k) out.push_back(Value::integer(static_cast<std::int64_t>(k)));
  } else {
    out = enumerate_values(std::get<domain::AllOf>(d).type, ctx.bounds);
  }
  return out;
}

}  // namespace

Value eval(const Expr& e, const Env& env, const EvalContext& ctx) {
  return std::visit(
      [&](const auto& n) -> Value {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, expr::IntLit>) {
          return Value::integer(n.value);
        } else if constexpr (std::is_same_v<T, expr::BoolLit>) {
          return Value::boolean(n.value);
        } else if constexpr (std::is_same_v<T, expr::Var>) {
          return lookup(env, n.name);
        } else if constexpr (std::is_same_v<T, expr::Old>) {
          return lookup(ctx.old_env ? *ctx.old_env : env, n.name);
        } else if constexpr (std::is_same_v<T, expr::Result>) {
          return lookup(env, "result");
        } else if constexpr (std::is_same_v<T, expr::Binary>) {
          return eval_binary(n, env, ctx);
        } else if constexpr (std::is_same_v<T, expr::Not>) {
          return Value::boolean(!as_bool(eval(n.inner, env, ctx)));
        } else if constexpr (std::is_same_v<T, expr::SeqLit>) {
          std::vector<std::int64_t> xs;
          for (const auto& x : n.elems) xs.push_back(as_int(eval(x, env, ctx)));
          return Value::sequence(std::move(xs));
        } else if constexpr (std::is_same_v<T, expr::SeqOp>) {
          return eval_seq_op(n, env, ctx);
        } else if constexpr (std::is_same_v<T, expr::Call>) {
          const Value recv = eval(n.receiver, env, ctx);
          if (recv.kind == Type::Kind::Object && n.args.empty() && ctx.schemas) {
            const auto it = ctx.schemas->find(recv.cls);
            if (it != ctx.schemas->end()) {
              for (std::size_t k = 0; k < it->second.size() && k < recv.fields.size(); ++k) {
                if (it->second[k] == n.method) return recv.fields[k];
              }
            }
          }
          throw EvalError("call to '" + n.method + "' cannot be evaluated");
        } else if constexpr (std::is_same_v<T, expr::New>) {
          std::vector<Value> args;
          for (const auto& a : n.args) args.push_back(eval(a, env, ctx));
          if (n.cls == "Nil" && args.empty()) return Value::sequence({});
          if (n.cls == "Cons" && args.size() == 2) {
            auto tail = as_seq(args[1]);
            tail.insert(tail.begin(), as_int(args[0]));
            return Value::sequence(std::move(tail));
          }
          return Value::object(n.cls, std::move(args));
        } else {
          return as_bool(eval(n.cond, env, ctx)) ? eval(n.then_branch, env, ctx)
                                                 : eval(n.else_branch, env, ctx);
        }
      },
      e.node().v);
}

bool holds(const Predicate& p, Env& env, const EvalContext& ctx) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, pred::Atom>) {
          return as_bool(eval(n.expr, env, ctx));
        } else if constexpr (std::is_same_v<T, pred::And>) {
          for (const auto& part : n.parts) {
            if (!holds(part, env, ctx)) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, pred::Or>) {
          for (const auto& part : n.parts) {
            if (holds(part, env, ctx)) return true;
          }
          return false;
        } else if constexpr (std::is_same_v<T, pred::Not>) {
          return !holds(n.inner, env, ctx);
        } else if constexpr (std::is_same_v<T, pred::Implies>) {
          return !holds(n.lhs, env, ctx) || holds(n.rhs, env, ctx);
        } else if constexpr (std::is_same_v<T, pred::Forall> ||
                             std::is_same_v<T, pred::Exists>) {
          constexpr bool universal = std::is_same_v<T, pred::Forall>;
          for (auto& v : domain_values(n.dom, env, ctx)) {
            env.push(n.var, std::move(v));
            bool b;
            try {
              b = holds(n.body, env, ctx);
            } catch (...) {
              env.pop();
              throw;
            }
            env.pop();
            if (b != universal) return !universal;
          }
          return universal;
        } else if constexpr (std::is_same_v<T, pred::True>) {
          return true;
        } else {
          return false;
        }
      },
      p.node().v);
}

std::vector<Value> enumerate_values(
    const Type& t, const Bounds& b,
    const std::map<std::string, std::vector<Type>, std::less<>>& field_types) {
  std::vector<Value> out;
  switch (t.kind) {
    case Type::Kind::Int:
      for (auto k = -b.int_bound; k <= b.int_bound; ++k) out.push_back(Value::integer(k));
      break;
    case Type::Kind::Bool:
      out.push_back(Value::boolean(false));
      out.push_back(Value::boolean(true));
      break;
    case Type::Kind::Seq: {
      const auto width = 2 * b.seq_elem_bound + 1;
      for (std::int64_t len = 0; len <= b.max_seq_len; ++len) {
        std::vector<std::int64_t> digits(static_cast<std::size_t>(len), 0);
        for (;;) {
          std::vector<std::int64_t> s;
          for (auto d : digits) s.push_back(d - b.seq_elem_bound);
          out.push_back(Value::sequence(std::move(s)));
          std::int64_t k = len - 1;
          while (k >= 0 && digits[static_cast<std::size_t>(k)] == width - 1) {
            digits[static_cast<std::size_t>(k)] = 0;
            --k;
          }
          if (k < 0) break;
          ++digits[static_cast<std::size_t>(k)];
        }
      }
      break;
    }
    case Type::Kind::Object: {
      const auto it = field_types.find(t.cls);
      std::vector<std::vector<Value>> tuples{{}};
      if (it != field_types.end()) {
        for (const auto& ft : it->second) {
          if (ft.kind == Type::Kind::Object) {
            throw EvalError("cannot enumerate nested objects of class " + ft.cls);
          }
          std::vector<std::vector<Value>> next;
          for (const auto& prefix : tuples) {
            for (const auto& v : enumerate_values(ft, b)) {
              auto row = prefix;
              row.push_back(v);
              next.push_back(std::move(row));
            }
          }
          tuples = std::move(next);
        }
      }
      for (auto& row : tuples) out.push_back(Value::object(t.cls, std::move(row)));
      break;
    }
    case Type::Kind::Unit: out.push_back(Value{}); break;
  }
  return out;
}

void exec(const Statement& s, Env& env, const EvalContext& ctx, const CallHandler& calls,
          long& fuel) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, stmt::Skip>) {
        } else if constexpr (std::is_same_v<T, stmt::Assign>) {
          env.set(n.target, eval(n.value, env, ctx));
        } else if constexpr (std::is_same_v<T, stmt::Seq>) {
          exec(n.first, env, ctx, calls, fuel);
          exec(n.second, env, ctx, calls, fuel);
        } else if constexpr (std::is_same_v<T, stmt::Select>) {
          for (const auto& b : n.branches) {
            if (as_bool(eval(b.guard, env, ctx))) {
              const auto mark = env.size();
              exec(b.body, env, ctx, calls, fuel);
              env.truncate(mark);
              return;
            }
          }
          throw ExecError("no guard of the selection is enabled");
        } else if constexpr (std::is_same_v<T, stmt::Repeat>) {
          while (as_bool(eval(n.guard, env, ctx))) {
            if (--fuel < 0) throw ExecError("loop ran out of fuel");
            const auto mark = env.size();
            exec(n.body, env, ctx, calls, fuel);
            env.truncate(mark);
          }
        } else if constexpr (std::is_same_v<T, stmt::MethodCall>) {
          if (!calls) throw ExecError("no implementation for method '" + n.method + "'");
          std::vector<Value> args;
          for (const auto& a : n.args) args.push_back(eval(a, env, ctx));
          env.set(n.target, calls(n.method, args));
        } else if constexpr (std::is_same_v<T, stmt::LocalDecl>) {
          env.push(n.name, eval(n.init, env, ctx));
        } else if constexpr (std::is_same_v<T, stmt::Abstract>) {
          throw ExecError("abstract statement " + n.id + " cannot run");
        } else {
          throw ExecError("block " + n.name + " cannot run before inlining");
        }
      },
      s.node().v);
}

}  // namespace cbc
