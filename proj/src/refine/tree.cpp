#include "cbc/refine/tree.hpp"

#include <algorithm>
#include <map>

#include "cbc/block/block.hpp"
#include "cbc/kernel/print.hpp"
#include "cbc/kernel/syntax.hpp"
#include "detail.hpp"

namespace cbc {

const char* to_string(Status s) {
  switch (s) {
    case Status::Open: return "open";
    case Status::Proven: return "proven";
    case Status::Failed: return "failed";
  }
  return "?";
}

std::vector<VarDecl> MethodUnit::declared() const {
  std::vector<VarDecl> out = params;
  out.insert(out.end(), locals.begin(), locals.end());
  if (ret.kind != Type::Kind::Unit) out.push_back({"result", ret});
  return out;
}

namespace {

const RefinementNode* find_in(const RefinementNode& n, const std::string& id) {
  if (n.id == id) return &n;
  for (const auto& c : n.children) {
    if (const auto* r = find_in(c, id)) return r;
  }
  return nullptr;
}

}  // namespace

const RefinementNode* MethodUnit::find(const std::string& id) const { return find_in(root, id); }

const BlockDecl* MethodUnit::block(const std::string& name) const {
  for (const auto& b : blocks) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

namespace detail {

RefinementNode& open_node(MethodUnit& u, const std::string& id) {
  auto* n = const_cast<RefinementNode*>(u.find(id));
  if (!n) throw RefineError("no node " + id + " in method " + u.name);
  if (n->rule || !n->stmt.is<stmt::Abstract>()) {
    throw RefineError("node " + id + " is already refined");
  }
  return *n;
}

std::string draw_id(MethodUnit& u) { return "A" + std::to_string(u.next_id++); }

CheckedObligation obligation(const std::string& id, const std::string& provenance,
                             const Predicate& h, const Predicate& c, std::vector<VarDecl> extra) {
  return {Obligation{id, h, c, provenance, {}, {}}, std::move(extra), std::nullopt};
}

TypeEnv type_env(const std::vector<VarDecl>& vars) {
  TypeEnv env;
  for (const auto& v : vars) env[v.name] = v.type;
  return env;
}

namespace {

bool all_declared(const NameSet& names, const TypeEnv& env) {
  return std::all_of(names.begin(), names.end(), [&](const std::string& n) { return env.count(n) > 0; });
}

}  // namespace

// Sorts can only be checked once every variable is declared; predicates
// over locals introduced later are checked when discharged.
void check_sorts(const Predicate& p, const TypeEnv& env) {
  if (!all_declared(free_vars(p), env)) return;
  try {
    check_predicate(p, env);
  } catch (const TypeError& e) {
    throw RefineError(e.what());
  }
}

Type check_sort(const Expr& e, const TypeEnv& env) {
  try {
    return type_of(e, env);
  } catch (const TypeError& err) {
    throw RefineError(err.what());
  }
}

NameSet taken_names(const MethodUnit& u) {
  NameSet out;
  auto add = [&](const NameSet& s) { out.insert(s.begin(), s.end()); };
  for (const auto& v : u.declared()) out.insert(v.name);
  std::vector<const RefinementNode*> stack{&u.root};
  while (!stack.empty()) {
    const auto* n = stack.back();
    stack.pop_back();
    add(all_names(n->pre));
    add(all_names(n->post));
    add(all_names(n->stmt));
    for (const auto& c : n->children) stack.push_back(&c);
  }
  for (const auto& b : u.blocks) {
    add(all_names(b.contract.pre));
    add(all_names(b.contract.post));
    for (const auto& v : b.accessible) out.insert(v.name);
    for (const auto& v : b.assignable) out.insert(v.name);
    for (const auto& v : b.locals) out.insert(v.name);
    if (b.instantiation) add(all_names(*b.instantiation));
    if (b.renamed) add(all_names(*b.renamed));
  }
  return out;
}

Statement replace_holes(const Statement& s, const std::function<Statement(const Statement&)>& f) {
  return std::visit(
      [&](const auto& n) -> Statement {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, stmt::Abstract> || std::is_same_v<T, stmt::BlockRef>) {
          return f(s);
        } else if constexpr (std::is_same_v<T, stmt::Seq>) {
          return seq(replace_holes(n.first, f), replace_holes(n.second, f));
        } else if constexpr (std::is_same_v<T, stmt::Select>) {
          std::vector<stmt::Branch> bs;
          for (const auto& b : n.branches) bs.push_back({b.guard, replace_holes(b.body, f)});
          return select(std::move(bs));
        } else if constexpr (std::is_same_v<T, stmt::Repeat>) {
          return repeat(n.invariant, n.variant, n.guard, replace_holes(n.body, f));
        } else {
          return s;
        }
      },
      s.node().v);
}

Predicate ground_result(const Predicate& p) {
  return substitute(p, SubstTarget::result(), var("result"));
}

std::string sanitize(const std::string& label) {
  std::string out = label;
  std::replace(out.begin(), out.end(), ' ', '-');
  return out;
}

}  // namespace detail

using namespace detail;

MethodUnit make_unit(std::string name, std::vector<VarDecl> params, Type ret, Contract contract) {
  MethodUnit u;
  u.name = std::move(name);
  NameSet seen;
  for (const auto& p : params) {
    if (p.name == "result") throw RefineError("a parameter may not be called result");
    if (!seen.insert(p.name).second) throw RefineError("duplicate parameter " + p.name);
  }
  u.params = std::move(params);
  u.ret = ret;
  u.contract = {ground_result(contract.pre), resolve_old(ground_result(contract.post))};
  if (mentions_result(contract.pre)) throw RefineError("precondition of " + u.name + " mentions result");
  if (ret.kind == Type::Kind::Unit && mentions_result(u.contract.post)) {
    throw RefineError("void method " + u.name + " mentions result");
  }
  u.root = {"A0", u.contract.pre, abstract_stmt("A0"), u.contract.post, std::nullopt, {}, {}, Status::Open};
  return u;
}

namespace {

template <class F>
MethodUnit apply(const MethodUnit& u, const std::string& id, F&& f) {
  MethodUnit out = u;
  f(out, open_node(out, id));
  return out;
}

bool is_param(const MethodUnit& u, const std::string& name) {
  return std::any_of(u.params.begin(), u.params.end(),
                     [&](const VarDecl& p) { return p.name == name; });
}

RefinementNode child(const std::string& id, const Predicate& pre, const Predicate& post) {
  return {id, pre, abstract_stmt(id), post, std::nullopt, {}, {}, Status::Open};
}

}  // namespace

MethodUnit apply_skip(const MethodUnit& u, const std::string& node) {
  return apply(u, node, [&](MethodUnit&, RefinementNode& n) {
    n.stmt = skip();
    n.rule = RuleRecord{"skip", ""};
    n.obligations.push_back(obligation(node + ".skip", "skip at " + node, n.pre, n.post));
  });
}

MethodUnit apply_assignment(const MethodUnit& u, const std::string& node, const std::string& target,
                            const Expr& e, std::optional<Type> declare) {
  return apply(u, node, [&](MethodUnit& out, RefinementNode& n) {
    const TypeEnv env = type_env(out.declared());
    const Type t = check_sort(e, env);
    if (declare) {
      if (env.count(target)) throw RefineError("'" + target + "' is already declared");
      if (!(t == *declare)) {
        throw RefineError("cannot initialize " + to_string(*declare) + " " + target + " with " +
                          to_string(t));
      }
      out.locals.push_back({target, *declare});
      n.stmt = local_decl(target, *declare, e);
    } else {
      const auto it = env.find(target);
      if (it == env.end()) throw RefineError("assignment to undeclared variable '" + target + "'");
      if (is_param(out, target)) throw RefineError("parameter '" + target + "' is read-only");
      if (!(it->second == t)) {
        throw RefineError("cannot assign " + to_string(t) + " to " + to_string(it->second) + " " +
                          target);
      }
      n.stmt = assign(target, e);
    }
    n.rule = RuleRecord{"assignment", print(n.stmt)};
    n.obligations.push_back(obligation(node + ".assign", "assignment at " + node, n.pre,
                                       substitute(n.post, target, e)));
  });
}

MethodUnit apply_composition(const MethodUnit& u, const std::string& node, const Predicate& mid) {
  return apply(u, node, [&](MethodUnit& out, RefinementNode& n) {
    check_sorts(mid, type_env(out.declared()));
    const std::string a = draw_id(out);
    const std::string b = draw_id(out);
    n.stmt = seq(abstract_stmt(a), abstract_stmt(b));
    n.rule = RuleRecord{"composition", print(mid)};
    n.children.push_back(child(a, n.pre, mid));
    n.children.push_back(child(b, mid, n.post));
  });
}

MethodUnit apply_selection(const MethodUnit& u, const std::string& node,
                           const std::vector<Expr>& guards) {
  if (guards.empty()) throw RefineError("selection needs at least one guard");
  return apply(u, node, [&](MethodUnit& out, RefinementNode& n) {
    const TypeEnv env = type_env(out.declared());
    std::vector<Predicate> gs;
    std::vector<stmt::Branch> branches;
    std::string args;
    for (const auto& g : guards) {
      if (check_sort(g, env).kind != Type::Kind::Bool) {
        throw RefineError("guard '" + print(g) + "' is not boolean");
      }
      const std::string c = draw_id(out);
      gs.push_back(atom(g));
      branches.push_back({g, abstract_stmt(c)});
      n.children.push_back(child(c, conj({n.pre, atom(g)}), n.post));
      args += (args.empty() ? "" : " [] ") + print(g);
    }
    n.stmt = select(std::move(branches));
    n.rule = RuleRecord{"selection", args};
    n.obligations.push_back(obligation(node + ".coverage", "selection at " + node, n.pre, disj(gs)));
  });
}

MethodUnit apply_repetition(const MethodUnit& u, const std::string& node, const Predicate& inv,
                            const Expr& variant, const Expr& guard) {
  return apply(u, node, [&](MethodUnit& out, RefinementNode& n) {
    const TypeEnv env = type_env(out.declared());
    if (check_sort(variant, env).kind != Type::Kind::Int) {
      throw RefineError("variant '" + print(variant) + "' is not an integer");
    }
    if (check_sort(guard, env).kind != Type::Kind::Bool) {
      throw RefineError("guard '" + print(guard) + "' is not boolean");
    }
    check_sorts(inv, env);
    const std::string c = draw_id(out);
    n.stmt = repeat(inv, variant, guard, abstract_stmt(c));
    n.rule = RuleRecord{"repetition", print(inv) + " | " + print(variant) + " | " + print(guard)};
    n.obligations.push_back(obligation(node + ".entry", "repetition at " + node, n.pre, inv));
    n.obligations.push_back(obligation(node + ".exit", "repetition at " + node,
                                       conj({inv, atom(not_(guard))}), n.post));
    n.children.push_back(child(c, conj({inv, atom(guard)}), inv));
  });
}

MethodUnit apply_weaken_pre(const MethodUnit& u, const std::string& node, const Predicate& pre) {
  return apply(u, node, [&](MethodUnit& out, RefinementNode& n) {
    check_sorts(pre, type_env(out.declared()));
    const std::string c = draw_id(out);
    n.stmt = abstract_stmt(c);
    n.rule = RuleRecord{"weaken", print(pre)};
    n.obligations.push_back(obligation(node + ".weaken", "weaken precondition at " + node, n.pre, pre));
    n.children.push_back(child(c, pre, n.post));
  });
}

MethodUnit apply_strengthen_post(const MethodUnit& u, const std::string& node,
                                 const Predicate& post) {
  return apply(u, node, [&](MethodUnit& out, RefinementNode& n) {
    check_sorts(post, type_env(out.declared()));
    const std::string c = draw_id(out);
    n.stmt = abstract_stmt(c);
    n.rule = RuleRecord{"strengthen", print(post)};
    n.obligations.push_back(
        obligation(node + ".strengthen", "strengthen postcondition at " + node, post, n.post));
    n.children.push_back(child(c, n.pre, post));
  });
}

MethodUnit apply_method_call(const MethodUnit& u, const std::string& node,
                             const std::string& callee, const std::vector<Expr>& args,
                             const std::string& target) {
  return apply(u, node, [&](MethodUnit& out, RefinementNode& n) {
    const auto it = out.callees.find(callee);
    if (it == out.callees.end()) throw RefineError("unknown method '" + callee + "'");
    const MethodSig& m = it->second;
    if (m.params.size() != args.size()) {
      throw RefineError("method '" + callee + "' expects " + std::to_string(m.params.size()) +
                        " arguments, got " + std::to_string(args.size()));
    }
    const TypeEnv env = type_env(out.declared());
    const auto t = env.find(target);
    if (t == env.end()) throw RefineError("call target '" + target + "' is not declared");
    if (is_param(out, target)) throw RefineError("parameter '" + target + "' is read-only");
    if (!(t->second == m.ret)) throw RefineError("call target '" + target + "' has the wrong sort");
    std::vector<std::pair<std::string, Expr>> by_param;
    Predicate post = m.contract.post;
    for (std::size_t k = 0; k < args.size(); ++k) {
      if (!(check_sort(args[k], env) == m.params[k].type)) {
        throw RefineError("argument " + std::to_string(k + 1) + " of '" + callee + "' has the wrong sort");
      }
      if (free_vars(args[k]).count(target)) {
        throw RefineError("call target '" + target + "' may not occur in the arguments");
      }
      by_param.emplace_back(m.params[k].name, args[k]);
      post = substitute(post, SubstTarget::old_of(m.params[k].name), args[k]);
    }
    post = substitute(substitute_all(post, by_param), SubstTarget::result(), var(target));
    n.stmt = method_call(callee, args, target);
    n.rule = RuleRecord{"call", print(n.stmt)};
    n.obligations.push_back(obligation(node + ".call-pre", "method call at " + node, n.pre,
                                       substitute_all(m.contract.pre, by_param)));
    n.obligations.push_back(obligation(node + ".call-post", "method call at " + node, post, n.post));
  });
}

namespace {

std::vector<VarDecl> merge(const std::vector<VarDecl>& a, const std::vector<VarDecl>& b) {
  std::vector<VarDecl> out;
  NameSet seen;
  for (const auto* vs : {&a, &b}) {
    for (const auto& v : *vs) {
      if (seen.insert(v.name).second) out.push_back(v);
    }
  }
  return out;
}

void discharge(CheckedObligation& c, const std::vector<VarDecl>& scope, const ProverConfig& cfg) {
  NameSet used = free_vars(c.ob.hypothesis);
  for (const auto& v : free_vars(c.ob.conclusion)) used.insert(v);
  c.ob.vars.clear();
  for (const auto& v : merge(scope, c.extra)) {
    if (used.count(v.name)) c.ob.vars.push_back(v);
  }
  c.result = check_implication(c.ob, cfg);
}

bool failed(const std::vector<CheckedObligation>& obs) {
  return std::any_of(obs.begin(), obs.end(),
                     [](const CheckedObligation& c) { return c.result && !c.result->is_valid(); });
}

Statement extract_node(const MethodUnit& u, const RefinementNode& n, bool inline_blocks) {
  if (!n.rule) return n.stmt;
  return replace_holes(n.stmt, [&](const Statement& h) -> Statement {
    if (const auto* a = h.as<stmt::Abstract>()) {
      for (const auto& c : n.children) {
        if (c.id == a->id) return extract_node(u, c, inline_blocks);
      }
      return h;
    }
    const auto* b = h.as<stmt::BlockRef>();
    return inline_blocks ? inline_block(u, b->name) : h;
  });
}

struct Checker {
  MethodUnit& u;
  const ProverConfig& cfg;
  TreeReport& rep;
  std::map<std::string, Status> block_status;

  Status block(const std::string& name) {
    if (const auto it = block_status.find(name); it != block_status.end()) return it->second;
    auto* b = const_cast<BlockDecl*>(u.block(name));
    if (!b) return Status::Failed;
    Status s = Status::Proven;
    if (failed(b->obligations)) {
      s = Status::Failed;
    } else if (!b->instantiation) {
      s = Status::Open;
    }
    for (const auto& nested : u.blocks) {
      if (nested.origin != name || s == Status::Failed) continue;
      const Status ns = block(nested.name);
      if (ns == Status::Failed) s = Status::Failed;
      if (ns == Status::Open) s = Status::Open;
    }
    b->status = s;
    block_status[name] = s;
    return s;
  }

  void refresh_variant(RefinementNode& n) {
    const auto* r = n.stmt.as<stmt::Repeat>();
    if (!r || !n.rule) return;
    const std::string id = n.id + ".variant";
    n.obligations.erase(std::remove_if(n.obligations.begin(), n.obligations.end(),
                                       [&](const CheckedObligation& c) { return c.ob.id == id; }),
                        n.obligations.end());
    const Statement body = extract_node(u, n.children.front(), false);
    if (contains_abstract(body)) return;
    WpContext ctx;
    ctx.methods = &u.callees;
    ctx.frames = block_frames(u);
    for (const auto& v : u.declared()) ctx.types[v.name] = v.type;
    ctx.taken = taken_names(u);
    const std::string v0 = fresh_name("V0", ctx.taken);
    ctx.taken.insert(v0);
    const Predicate decrease = conj({atom(binary(BinOp::Le, int_lit(0), r->variant)),
                                     atom(binary(BinOp::Lt, r->variant, var(v0)))});
    const Predicate hyp = conj({r->invariant, atom(r->guard),
                                atom(binary(BinOp::Eq, r->variant, var(v0)))});
    try {
      const WpResult w = wp(body, decrease, ctx);
      n.obligations.push_back(
          obligation(id, "repetition at " + n.id, hyp, w.pre, {{v0, Type::integer()}}));
    } catch (const WpError& e) {
      CheckedObligation c = obligation(id, "repetition at " + n.id, hyp, p_false());
      c.result = ProofResult::unknown(e.what());
      n.obligations.push_back(c);
    }
  }

  Status node(RefinementNode& n) {
    refresh_variant(n);
    for (auto& c : n.obligations) {
      if (!c.result) discharge(c, u.declared(), cfg);
      rep.items.push_back({c.ob.id, c.ob.provenance, *c.result});
    }
    if (!n.rule) rep.open.push_back(n.id);
    bool any_failed = failed(n.obligations);
    bool any_open = !n.rule;
    if (n.stmt.is<stmt::Repeat>() &&
        std::none_of(n.obligations.begin(), n.obligations.end(),
                     [&](const CheckedObligation& c) { return c.ob.id == n.id + ".variant"; })) {
      any_open = true;
    }
    for (auto& c : n.children) {
      const Status s = node(c);
      any_failed = any_failed || s == Status::Failed;
      any_open = any_open || s == Status::Open;
    }
    if (const auto* b = n.stmt.as<stmt::BlockRef>()) {
      const Status s = block(b->name);
      any_failed = any_failed || s == Status::Failed;
      any_open = any_open || s == Status::Open;
    }
    n.status = any_failed ? Status::Failed : any_open ? Status::Open : Status::Proven;
    return n.status;
  }
};

}  // namespace

std::pair<MethodUnit, TreeReport> check_tree(const MethodUnit& u, const ProverConfig& cfg) {
  MethodUnit out = u;
  TreeReport rep;
  Checker ch{out, cfg, rep, {}};
  const std::vector<VarDecl> declared = out.declared();
  for (auto& b : out.blocks) {
    for (auto& c : b.obligations) {
      if (!c.result) discharge(c, declared, cfg);
    }
  }
  rep.root = ch.node(out.root);
  for (const auto& b : out.blocks) {
    ch.block(b.name);
    for (const auto& c : b.obligations) rep.items.push_back({c.ob.id, c.ob.provenance, *c.result});
    if (!b.instantiation) rep.open.push_back(b.name);
  }
  return {out, rep};
}

Statement extract_program(const MethodUnit& u) { return extract_node(u, u.root, true); }

std::vector<Obligation> post_hoc_obligations(const MethodUnit& u) {
  const Statement prog = extract_program(u);
  WpContext ctx;
  ctx.methods = &u.callees;
  ctx.frames = block_frames(u);
  std::vector<VarDecl> scope = u.declared();
  for (const auto& b : u.blocks) scope = merge(scope, b.locals);
  for (const auto& v : scope) ctx.types[v.name] = v.type;
  ctx.taken = taken_names(u);
  const WpResult w = wp(prog, u.contract.post, ctx);

  std::vector<CheckedObligation> obs;
  obs.push_back(obligation(u.name + ".post-hoc", "post-hoc check of " + u.name, u.contract.pre, w.pre));
  int k = 0;
  for (const auto& s : w.sides) {
    obs.push_back(obligation(u.name + ".post-hoc." + sanitize(s.label) + "." + std::to_string(k++),
                             "post-hoc " + s.label + " of " + u.name, s.hypothesis, s.conclusion,
                             s.extra));
  }
  std::vector<Obligation> out;
  for (auto& c : obs) {
    NameSet used = free_vars(c.ob.hypothesis);
    for (const auto& v : free_vars(c.ob.conclusion)) used.insert(v);
    for (const auto& v : merge(scope, c.extra)) {
      if (used.count(v.name)) c.ob.vars.push_back(v);
    }
    out.push_back(c.ob);
  }
  return out;
}

}  // namespace cbc
