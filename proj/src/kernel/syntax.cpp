#include "cbc/kernel/syntax.hpp"

#include <algorithm>

namespace cbc {

namespace {

bool matches(const Expr& e, const SubstTarget& t) {
  switch (t.kind) {
    case SubstTarget::Kind::Var:
      if (const auto* v = e.as<expr::Var>()) return v->name == t.name;
      return false;
    case SubstTarget::Kind::Result: return e.is<expr::Result>();
    case SubstTarget::Kind::OldVar:
      if (const auto* o = e.as<expr::Old>()) return o->name == t.name;
      return false;
  }
  return false;
}

template <class F>
Expr map_children(const Expr& e, F&& f) {
  return std::visit(
      [&](const auto& n) -> Expr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, expr::Binary>) {
          return binary(n.op, f(n.lhs), f(n.rhs));
        } else if constexpr (std::is_same_v<T, expr::Not>) {
          return not_(f(n.inner));
        } else if constexpr (std::is_same_v<T, expr::SeqLit>) {
          std::vector<Expr> xs;
          for (const auto& x : n.elems) xs.push_back(f(x));
          return seq_lit(std::move(xs));
        } else if constexpr (std::is_same_v<T, expr::SeqOp>) {
          std::optional<Expr> a;
          if (n.arg) a = f(*n.arg);
          return seq_op(n.op, f(n.receiver), std::move(a));
        } else if constexpr (std::is_same_v<T, expr::Call>) {
          std::vector<Expr> xs;
          for (const auto& x : n.args) xs.push_back(f(x));
          return call(f(n.receiver), n.method, std::move(xs));
        } else if constexpr (std::is_same_v<T, expr::New>) {
          std::vector<Expr> xs;
          for (const auto& x : n.args) xs.push_back(f(x));
          return new_(n.cls, std::move(xs));
        } else if constexpr (std::is_same_v<T, expr::Ite>) {
          return ite(f(n.cond), f(n.then_branch), f(n.else_branch));
        } else {
          return e;
        }
      },
      e.node().v);
}

template <class F>
void each_child(const Expr& e, F&& f) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, expr::Binary>) {
          f(n.lhs);
          f(n.rhs);
        } else if constexpr (std::is_same_v<T, expr::Not>) {
          f(n.inner);
        } else if constexpr (std::is_same_v<T, expr::SeqLit>) {
          for (const auto& x : n.elems) f(x);
        } else if constexpr (std::is_same_v<T, expr::SeqOp>) {
          f(n.receiver);
          if (n.arg) f(*n.arg);
        } else if constexpr (std::is_same_v<T, expr::Call>) {
          f(n.receiver);
          for (const auto& x : n.args) f(x);
        } else if constexpr (std::is_same_v<T, expr::New>) {
          for (const auto& x : n.args) f(x);
        } else if constexpr (std::is_same_v<T, expr::Ite>) {
          f(n.cond);
          f(n.then_branch);
          f(n.else_branch);
        }
      },
      e.node().v);
}

BoundedDomain map_domain(const BoundedDomain& d, const auto& f) {
  return std::visit(
      [&](const auto& n) -> BoundedDomain {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, domain::IntRange>) {
          return domain::IntRange{f(n.lo), f(n.hi)};
        } else if constexpr (std::is_same_v<T, domain::SeqElems>) {
          return domain::SeqElems{f(n.seq)};
        } else if constexpr (std::is_same_v<T, domain::SeqIndices>) {
          return domain::SeqIndices{f(n.seq)};
        } else {
          return n;
        }
      },
      d);
}

void each_domain_expr(const BoundedDomain& d, const auto& f) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, domain::IntRange>) {
          f(n.lo);
          f(n.hi);
        } else if constexpr (std::is_same_v<T, domain::SeqElems> ||
                             std::is_same_v<T, domain::SeqIndices>) {
          f(n.seq);
        }
      },
      d);
}

void collect_free(const Expr& e, NameSet& out) {
  if (const auto* v = e.as<expr::Var>()) {
    out.insert(v->name);
    return;
  }
  if (const auto* o = e.as<expr::Old>()) {
    out.insert(o->name);
    return;
  }
  each_child(e, [&](const Expr& c) { collect_free(c, out); });
}

void collect_free(const Predicate& p, NameSet& out);

void collect_quant(const std::string& v, const BoundedDomain& d, const Predicate& body,
                   NameSet& out) {
  each_domain_expr(d, [&](const Expr& x) { collect_free(x, out); });
  NameSet inner;
  collect_free(body, inner);
  inner.erase(v);
  out.insert(inner.begin(), inner.end());
}

void collect_free(const Predicate& p, NameSet& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, pred::Atom>) {
          collect_free(n.expr, out);
        } else if constexpr (std::is_same_v<T, pred::And> || std::is_same_v<T, pred::Or>) {
          for (const auto& x : n.parts) collect_free(x, out);
        } else if constexpr (std::is_same_v<T, pred::Not>) {
          collect_free(n.inner, out);
        } else if constexpr (std::is_same_v<T, pred::Implies>) {
          collect_free(n.lhs, out);
          collect_free(n.rhs, out);
        } else if constexpr (std::is_same_v<T, pred::Forall> ||
                             std::is_same_v<T, pred::Exists>) {
          collect_quant(n.var, n.dom, n.body, out);
        }
      },
      p.node().v);
}

void collect_all(const Predicate& p, NameSet& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, pred::Atom>) {
          collect_free(n.expr, out);
        } else if constexpr (std::is_same_v<T, pred::And> || std::is_same_v<T, pred::Or>) {
          for (const auto& x : n.parts) collect_all(x, out);
        } else if constexpr (std::is_same_v<T, pred::Not>) {
          collect_all(n.inner, out);
        } else if constexpr (std::is_same_v<T, pred::Implies>) {
          collect_all(n.lhs, out);
          collect_all(n.rhs, out);
        } else if constexpr (std::is_same_v<T, pred::Forall> ||
                             std::is_same_v<T, pred::Exists>) {
          out.insert(n.var);
          each_domain_expr(n.dom, [&](const Expr& x) { collect_free(x, out); });
          collect_all(n.body, out);
        }
      },
      p.node().v);
}

bool any_expr(const Expr& e, const auto& pred_fn) {
  if (pred_fn(e)) return true;
  bool found = false;
  each_child(e, [&](const Expr& c) { found = found || any_expr(c, pred_fn); });
  return found;
}

bool any_pred_expr(const Predicate& p, const auto& pred_fn) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, pred::Atom>) {
          return any_expr(n.expr, pred_fn);
        } else if constexpr (std::is_same_v<T, pred::And> || std::is_same_v<T, pred::Or>) {
          return std::any_of(n.parts.begin(), n.parts.end(),
                             [&](const Predicate& x) { return any_pred_expr(x, pred_fn); });
        } else if constexpr (std::is_same_v<T, pred::Not>) {
          return any_pred_expr(n.inner, pred_fn);
        } else if constexpr (std::is_same_v<T, pred::Implies>) {
          return any_pred_expr(n.lhs, pred_fn) || any_pred_expr(n.rhs, pred_fn);
        } else if constexpr (std::is_same_v<T, pred::Forall> ||
                             std::is_same_v<T, pred::Exists>) {
          bool in_dom = false;
          each_domain_expr(n.dom,
                           [&](const Expr& x) { in_dom = in_dom || any_expr(x, pred_fn); });
          return in_dom || any_pred_expr(n.body, pred_fn);
        } else {
          return false;
        }
      },
      p.node().v);
}

}  // namespace

Expr substitute(const Expr& e, const SubstTarget& target, const Expr& replacement) {
  if (matches(e, target)) return replacement;
  return map_children(e, [&](const Expr& c) { return substitute(c, target, replacement); });
}

Expr substitute_all(const Expr& e, const std::vector<std::pair<std::string, Expr>>& subst) {
  if (const auto* v = e.as<expr::Var>()) {
    for (const auto& [name, rep] : subst) {
      if (name == v->name) return rep;
    }
    return e;
  }
  return map_children(e, [&](const Expr& c) { return substitute_all(c, subst); });
}

namespace {

bool target_free_in(const Predicate& p, const SubstTarget& t) {
  switch (t.kind) {
    case SubstTarget::Kind::Var: return free_vars(p).count(t.name) > 0;
    case SubstTarget::Kind::Result: return mentions_result(p);
    case SubstTarget::Kind::OldVar:
      return any_pred_expr(p, [&](const Expr& e) {
        const auto* o = e.as<expr::Old>();
        return o != nullptr && o->name == t.name;
      });
  }
  return false;
}

// Rebuilds a quantifier, renaming its binder away from `avoid` first when
// needed. `body_fn` transforms the (possibly renamed) body.
template <class Q, class BodyFn, class DomFn>
Predicate rebuild_quant(const Q& q, const NameSet& avoid, DomFn&& dom_fn, BodyFn&& body_fn) {
  std::string bound = q.var;
  Predicate body = q.body;
  if (avoid.count(bound)) {
    NameSet taken = avoid;
    NameSet names = all_names(body);
    taken.insert(names.begin(), names.end());
    bound = fresh_name(q.var, taken);
    body = substitute(body, SubstTarget::variable(q.var), var(bound));
  }
  auto dom = dom_fn(q.dom);
  auto new_body = body_fn(body);
  if constexpr (std::is_same_v<Q, pred::Forall>) {
    return forall(bound, std::move(dom), std::move(new_body));
  } else {
    return exists(bound, std::move(dom), std::move(new_body));
  }
}

}  // namespace

Predicate substitute(const Predicate& p, const SubstTarget& target, const Expr& replacement) {
  return std::visit(
      [&](const auto& n) -> Predicate {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, pred::Atom>) {
          return atom(substitute(n.expr, target, replacement));
        } else if constexpr (std::is_same_v<T, pred::And> || std::is_same_v<T, pred::Or>) {
          std::vector<Predicate> xs;
          for (const auto& x : n.parts) xs.push_back(substitute(x, target, replacement));
          return Predicate(std::make_shared<const PredicateNode>(PredicateNode{T{std::move(xs)}}));
        } else if constexpr (std::is_same_v<T, pred::Not>) {
          return p_not(substitute(n.inner, target, replacement));
        } else if constexpr (std::is_same_v<T, pred::Implies>) {
          return Predicate(std::make_shared<const PredicateNode>(
              PredicateNode{pred::Implies{substitute(n.lhs, target, replacement),
                                          substitute(n.rhs, target, replacement)}}));
        } else if constexpr (std::is_same_v<T, pred::Forall> ||
                             std::is_same_v<T, pred::Exists>) {
          auto sub_dom = [&](const BoundedDomain& d) {
            return map_domain(d, [&](const Expr& x) { return substitute(x, target, replacement); });
          };
          const bool shadowed = target.kind == SubstTarget::Kind::Var && target.name == n.var;
          if (shadowed || !target_free_in(n.body, target)) {
            return rebuild_quant(n, NameSet{}, sub_dom, [](const Predicate& b) { return b; });
          }
          return rebuild_quant(n, free_vars(replacement), sub_dom, [&](const Predicate& b) {
            return substitute(b, target, replacement);
          });
        } else {
          return p;
        }
      },
      p.node().v);
}

Predicate substitute_all(const Predicate& p,
                         const std::vector<std::pair<std::string, Expr>>& subst) {
  if (subst.empty()) return p;
  // Route through unique placeholders so the substitution is simultaneous.
  NameSet taken = all_names(p);
  for (const auto& [name, rep] : subst) {
    taken.insert(name);
    auto fv = free_vars(rep);
    taken.insert(fv.begin(), fv.end());
  }
  std::vector<std::pair<std::string, std::string>> tmp;
  Predicate out = p;
  for (const auto& [name, rep] : subst) {
    std::string t = fresh_name(name + "'s", taken);
    taken.insert(t);
    tmp.emplace_back(t, name);
    out = substitute(out, SubstTarget::variable(name), var(t));
  }
  for (std::size_t i = 0; i < subst.size(); ++i) {
    out = substitute(out, SubstTarget::variable(tmp[i].first), subst[i].second);
  }
  return out;
}

namespace {
Expr resolve_old_expr(const Expr& e) {
  if (const auto* o = e.as<expr::Old>()) return var(o->name);
  return map_children(e, resolve_old_expr);
}
}  // namespace

Predicate resolve_old(const Predicate& p) {
  return std::visit(
      [&](const auto& n) -> Predicate {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, pred::Atom>) {
          return atom(resolve_old_expr(n.expr));
        } else if constexpr (std::is_same_v<T, pred::And>) {
          std::vector<Predicate> xs;
          for (const auto& x : n.parts) xs.push_back(resolve_old(x));
          return conj(std::move(xs));
        } else if constexpr (std::is_same_v<T, pred::Or>) {
          std::vector<Predicate> xs;
          for (const auto& x : n.parts) xs.push_back(resolve_old(x));
          return disj(std::move(xs));
        } else if constexpr (std::is_same_v<T, pred::Not>) {
          return p_not(resolve_old(n.inner));
        } else if constexpr (std::is_same_v<T, pred::Implies>) {
          return implies(resolve_old(n.lhs), resolve_old(n.rhs));
        } else if constexpr (std::is_same_v<T, pred::Forall>) {
          return forall(n.var, map_domain(n.dom, resolve_old_expr), resolve_old(n.body));
        } else if constexpr (std::is_same_v<T, pred::Exists>) {
          return exists(n.var, map_domain(n.dom, resolve_old_expr), resolve_old(n.body));
        } else {
          return p;
        }
      },
      p.node().v);
}

NameSet free_vars(const Expr& e) {
  NameSet out;
  collect_free(e, out);
  return out;
}

NameSet free_vars(const Predicate& p) {
  NameSet out;
  collect_free(p, out);
  return out;
}

NameSet all_names(const Predicate& p) {
  NameSet out;
  collect_all(p, out);
  return out;
}

bool mentions_result(const Expr& e) {
  return any_expr(e, [](const Expr& x) { return x.is<expr::Result>(); });
}
bool mentions_result(const Predicate& p) {
  return any_pred_expr(p, [](const Expr& x) { return x.is<expr::Result>(); });
}
bool mentions_old(const Expr& e) {
  return any_expr(e, [](const Expr& x) { return x.is<expr::Old>(); });
}
bool mentions_old(const Predicate& p) {
  return any_pred_expr(p, [](const Expr& x) { return x.is<expr::Old>(); });
}

std::string fresh_name(const std::string& base, const NameSet& taken) {
  if (!taken.count(base)) return base;
  for (int k = 1;; ++k) {
    std::string candidate = base + "'" + std::to_string(k);
    if (!taken.count(candidate)) return candidate;
  }
}

namespace {

void stmt_names(const Statement& s, NameSet& out, bool include_decls) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, stmt::Assign>) {
          out.insert(n.target);
          collect_free(n.value, out);
        } else if constexpr (std::is_same_v<T, stmt::Seq>) {
          stmt_names(n.first, out, include_decls);
          stmt_names(n.second, out, include_decls);
        } else if constexpr (std::is_same_v<T, stmt::Select>) {
          for (const auto& b : n.branches) {
            collect_free(b.guard, out);
            stmt_names(b.body, out, include_decls);
          }
        } else if constexpr (std::is_same_v<T, stmt::Repeat>) {
          if (include_decls) collect_all(n.invariant, out);
          else collect_free(n.invariant, out);
          collect_free(n.variant, out);
          collect_free(n.guard, out);
          stmt_names(n.body, out, include_decls);
        } else if constexpr (std::is_same_v<T, stmt::MethodCall>) {
          for (const auto& a : n.args) collect_free(a, out);
          out.insert(n.target);
        } else if constexpr (std::is_same_v<T, stmt::BlockRef>) {
          if (include_decls) {
            collect_all(n.pre, out);
            collect_all(n.post, out);
          } else {
            collect_free(n.pre, out);
            collect_free(n.post, out);
          }
        } else if constexpr (std::is_same_v<T, stmt::LocalDecl>) {
          out.insert(n.name);
          collect_free(n.init, out);
        }
      },
      s.node().v);
}

struct Renamer {
  NameSet taken;  // declarations with these names are renamed
  NameSet pool;   // fresh names avoid these
  Renaming renaming;

  // `env` maps in-scope renamed names. Returns the statement and the
  // renamings a declaration exports to the remainder of its sequence.
  std::pair<Statement, std::vector<std::pair<std::string, Expr>>> run(
      const Statement& s, const std::vector<std::pair<std::string, Expr>>& env) {
    using Env = std::vector<std::pair<std::string, Expr>>;
    auto rn_expr = [&](const Expr& e) { return substitute_all(e, env); };
    auto rn_pred = [&](const Predicate& p) { return substitute_all(p, env); };
    auto rn_name = [&](const std::string& n) {
      for (const auto& [from, to] : env) {
        if (from == n) return to.as<expr::Var>()->name;
      }
      return n;
    };
    return std::visit(
        [&](const auto& n) -> std::pair<Statement, Env> {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, stmt::Assign>) {
            return {assign(rn_name(n.target), rn_expr(n.value)), {}};
          } else if constexpr (std::is_same_v<T, stmt::Seq>) {
            auto [first, exported] = run(n.first, env);
            Env inner = exported;
            inner.insert(inner.end(), env.begin(), env.end());
            auto [second, exported2] = run(n.second, inner);
            exported2.insert(exported2.end(), exported.begin(), exported.end());
            return {seq(first, second), exported2};
          } else if constexpr (std::is_same_v<T, stmt::Select>) {
            std::vector<stmt::Branch> bs;
            for (const auto& b : n.branches) bs.push_back({rn_expr(b.guard), run(b.body, env).first});
            return {select(std::move(bs)), {}};
          } else if constexpr (std::is_same_v<T, stmt::Repeat>) {
            return {repeat(rn_pred(n.invariant), rn_expr(n.variant), rn_expr(n.guard),
                           run(n.body, env).first),
                    {}};
          } else if constexpr (std::is_same_v<T, stmt::MethodCall>) {
            std::vector<Expr> args;
            for (const auto& a : n.args) args.push_back(rn_expr(a));
            return {method_call(n.method, std::move(args), rn_name(n.target)), {}};
          } else if constexpr (std::is_same_v<T, stmt::BlockRef>) {
            return {block_ref(n.name, rn_pred(n.pre), rn_pred(n.post)), {}};
          } else if constexpr (std::is_same_v<T, stmt::LocalDecl>) {
            Expr init = rn_expr(n.init);
            if (!taken.count(n.name)) {
              taken.insert(n.name);
              // A later redeclaration of this name must not capture it.
              Env shadow;
              for (const auto& [from, to] : env) {
                if (from == n.name) shadow.emplace_back(n.name, var(n.name));
              }
              return {local_decl(n.name, n.type, init), shadow};
            }
            std::string fresh = fresh_name(n.name, pool);
            pool.insert(fresh);
            renaming.emplace_back(n.name, fresh);
            return {local_decl(fresh, n.type, init), {{n.name, var(fresh)}}};
          } else {
            return {s, {}};
          }
        },
        s.node().v);
  }
};

}  // namespace

NameSet free_vars(const Statement& s) {
  NameSet out;
  stmt_names(s, out, false);
  return out;
}

NameSet all_names(const Statement& s) {
  NameSet out;
  stmt_names(s, out, true);
  return out;
}

std::pair<Statement, Renaming> alpha_rename(const Statement& s, const NameSet& taken) {
  Renamer r;
  r.taken = taken;
  r.pool = taken;
  NameSet names = all_names(s);
  r.pool.insert(names.begin(), names.end());
  auto out = r.run(s, {});
  return {out.first, r.renaming};
}

NameSet assigned_vars(const Statement& s) {
  NameSet out;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, stmt::Assign>) {
          out.insert(n.target);
        } else if constexpr (std::is_same_v<T, stmt::Seq>) {
          auto a = assigned_vars(n.first);
          auto b = assigned_vars(n.second);
          out.insert(a.begin(), a.end());
          out.insert(b.begin(), b.end());
        } else if constexpr (std::is_same_v<T, stmt::Select>) {
          for (const auto& b : n.branches) {
            auto a = assigned_vars(b.body);
            out.insert(a.begin(), a.end());
          }
        } else if constexpr (std::is_same_v<T, stmt::Repeat>) {
          auto a = assigned_vars(n.body);
          out.insert(a.begin(), a.end());
        } else if constexpr (std::is_same_v<T, stmt::MethodCall>) {
          out.insert(n.target);
        } else if constexpr (std::is_same_v<T, stmt::LocalDecl>) {
          out.insert(n.name);
        }
      },
      s.node().v);
  return out;
}

std::vector<std::pair<std::string, Type>> local_decls(const Statement& s) {
  std::vector<std::pair<std::string, Type>> out;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        auto append = [&](const Statement& c) {
          auto xs = local_decls(c);
          out.insert(out.end(), xs.begin(), xs.end());
        };
        if constexpr (std::is_same_v<T, stmt::Seq>) {
          append(n.first);
          append(n.second);
        } else if constexpr (std::is_same_v<T, stmt::Select>) {
          for (const auto& b : n.branches) append(b.body);
        } else if constexpr (std::is_same_v<T, stmt::Repeat>) {
          append(n.body);
        } else if constexpr (std::is_same_v<T, stmt::LocalDecl>) {
          out.emplace_back(n.name, n.type);
        }
      },
      s.node().v);
  return out;
}

std::vector<Statement> seq_parts(const Statement& s) {
  if (const auto* q = s.as<stmt::Seq>()) {
    auto a = seq_parts(q->first);
    auto b = seq_parts(q->second);
    a.insert(a.end(), b.begin(), b.end());
    return a;
  }
  return {s};
}

bool contains_abstract(const Statement& s) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, stmt::Abstract>) {
          return true;
        } else if constexpr (std::is_same_v<T, stmt::Seq>) {
          return contains_abstract(n.first) || contains_abstract(n.second);
        } else if constexpr (std::is_same_v<T, stmt::Select>) {
          return std::any_of(n.branches.begin(), n.branches.end(),
                             [](const stmt::Branch& b) { return contains_abstract(b.body); });
        } else if constexpr (std::is_same_v<T, stmt::Repeat>) {
          return contains_abstract(n.body);
        } else {
          return false;
        }
      },
      s.node().v);
}

std::vector<std::string> block_refs(const Statement& s) {
  std::vector<std::string> out;
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        auto append = [&](const Statement& c) {
          auto xs = block_refs(c);
          out.insert(out.end(), xs.begin(), xs.end());
        };
        if constexpr (std::is_same_v<T, stmt::BlockRef>) {
          out.push_back(n.name);
        } else if constexpr (std::is_same_v<T, stmt::Seq>) {
          append(n.first);
          append(n.second);
        } else if constexpr (std::is_same_v<T, stmt::Select>) {
          for (const auto& b : n.branches) append(b.body);
        } else if constexpr (std::is_same_v<T, stmt::Repeat>) {
          append(n.body);
        }
      },
      s.node().v);
  return out;
}

}  // namespace cbc
