#include "cbc/prover/wp.hpp"

#include "cbc/kernel/print.hpp"

namespace cbc {

namespace {

std::string draw(const std::string& base, WpContext& ctx) {
  std::string n = fresh_name(base, ctx.taken);
  ctx.taken.insert(n);
  return n;
}

void reserve(const Predicate& p, WpContext& ctx) {
  for (const auto& n : all_names(p)) ctx.taken.insert(n);
}

void require_declared(const std::string& x, const WpContext& ctx) {
  if (!ctx.types.count(x)) throw WpError("assignment to undeclared variable '" + x + "'");
}

Predicate forall_values(const std::vector<VarDecl>& vs, Predicate body) {
  for (auto it = vs.rbegin(); it != vs.rend(); ++it) {
    body = forall(it->name, domain::AllOf{it->type}, body);
  }
  return body;
}

}  // namespace

WpResult wp(const Statement& s, const Predicate& q, WpContext& ctx) {
  reserve(q, ctx);
  for (const auto& n : all_names(s)) ctx.taken.insert(n);
  return std::visit(
      [&](const auto& n) -> WpResult {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, stmt::Skip>) {
          return {q, {}};
        } else if constexpr (std::is_same_v<T, stmt::Assign>) {
          require_declared(n.target, ctx);
          return {substitute(q, n.target, n.value), {}};
        } else if constexpr (std::is_same_v<T, stmt::LocalDecl>) {
          require_declared(n.name, ctx);
          return {substitute(q, n.name, n.init), {}};
        } else if constexpr (std::is_same_v<T, stmt::Seq>) {
          WpResult second = wp(n.second, q, ctx);
          WpResult first = wp(n.first, second.pre, ctx);
          first.sides.insert(first.sides.end(), second.sides.begin(), second.sides.end());
          return first;
        } else if constexpr (std::is_same_v<T, stmt::Select>) {
          std::vector<Predicate> guards;
          std::vector<Predicate> parts;
          std::vector<WpSide> sides;
          for (const auto& b : n.branches) {
            guards.push_back(atom(b.guard));
            WpResult r = wp(b.body, q, ctx);
            parts.push_back(implies(atom(b.guard), r.pre));
            sides.insert(sides.end(), r.sides.begin(), r.sides.end());
          }
          parts.insert(parts.begin(), disj(guards));
          return {conj(parts), sides};
        } else if constexpr (std::is_same_v<T, stmt::Repeat>) {
          const Predicate g = atom(n.guard);
          const Predicate ng = atom(not_(n.guard));
          std::vector<WpSide> sides;
          sides.push_back({"loop exit", conj({n.invariant, ng}), q, {}});
          WpResult keep = wp(n.body, n.invariant, ctx);
          sides.push_back({"loop preservation", conj({n.invariant, g}), keep.pre, {}});
          const std::string v0 = draw("V0", ctx);
          const Predicate decrease =
              conj({atom(binary(BinOp::Le, int_lit(0), n.variant)),
                    atom(binary(BinOp::Lt, n.variant, var(v0)))});
          WpResult term = wp(n.body, decrease, ctx);
          sides.push_back({"loop variant",
                           conj({n.invariant, g, atom(binary(BinOp::Eq, n.variant, var(v0)))}),
                           term.pre,
                           {{v0, Type::integer()}}});
          for (auto* r : {&keep, &term}) {
            sides.insert(sides.end(), r->sides.begin(), r->sides.end());
          }
          return {n.invariant, sides};
        } else if constexpr (std::is_same_v<T, stmt::MethodCall>) {
          if (!ctx.methods) throw WpError("no method table for call to '" + n.method + "'");
          const auto it = ctx.methods->find(n.method);
          if (it == ctx.methods->end()) throw WpError("unknown method '" + n.method + "'");
          const MethodSig& m = it->second;
          if (m.params.size() != n.args.size()) {
            throw WpError("method '" + n.method + "' expects " + std::to_string(m.params.size()) +
                          " arguments");
          }
          require_declared(n.target, ctx);
          for (const auto& a : n.args) {
            if (free_vars(a).count(n.target)) {
              throw WpError("call target '" + n.target + "' may not occur in the arguments");
            }
          }
          reserve(m.contract.pre, ctx);
          reserve(m.contract.post, ctx);
          const std::string r = draw(n.target, ctx);
          std::vector<std::pair<std::string, Expr>> by_param;
          Predicate post = m.contract.post;
          for (std::size_t k = 0; k < m.params.size(); ++k) {
            by_param.emplace_back(m.params[k].name, n.args[k]);
            post = substitute(post, SubstTarget::old_of(m.params[k].name), n.args[k]);
          }
          const Predicate pre = substitute_all(m.contract.pre, by_param);
          post = substitute_all(post, by_param);
          post = substitute(post, SubstTarget::result(), var(r));
          const Predicate after = substitute(q, n.target, var(r));
          return {conj({pre, forall_values({{r, m.ret}}, implies(post, after))}), {}};
        } else if constexpr (std::is_same_v<T, stmt::BlockRef>) {
          const auto it = ctx.frames.find(n.name);
          if (it == ctx.frames.end()) throw WpError("no frame for block " + n.name);
          reserve(n.pre, ctx);
          reserve(n.post, ctx);
          std::vector<VarDecl> fresh;
          std::vector<std::pair<std::string, Expr>> to_fresh;
          for (const auto& a : it->second.assignable) {
            fresh.push_back({draw(a.name, ctx), a.type});
            to_fresh.emplace_back(a.name, var(fresh.back().name));
          }
          Predicate post = substitute_all(n.post, to_fresh);
          post = resolve_old(post);
          const Predicate after = substitute_all(q, to_fresh);
          return {conj({n.pre, forall_values(fresh, implies(post, after))}), {}};
        } else {
          throw WpError("abstract statement " + n.id + " has no weakest precondition");
        }
      },
      s.node().v);
}

std::pair<Predicate, std::vector<std::pair<std::string, std::string>>> freeze_old(
    const Predicate& q, NameSet& taken) {
  for (const auto& n : all_names(q)) taken.insert(n);
  Predicate out = q;
  std::vector<std::pair<std::string, std::string>> ghosts;
  for (const auto& x : free_vars(q)) {
    const std::string g = fresh_name("old_" + x, taken);
    const Predicate next = substitute(out, SubstTarget::old_of(x), var(g));
    if (next == out) continue;
    taken.insert(g);
    ghosts.emplace_back(x, g);
    out = next;
  }
  return {out, ghosts};
}

}  // namespace cbc
