#include "cbc/block/block.hpp"

#include <algorithm>
#include <map>

#include "cbc/kernel/print.hpp"
#include "cbc/kernel/syntax.hpp"
#include "../refine/detail.hpp"

namespace cbc {

using namespace detail;

namespace {

std::vector<VarDecl> resolve(const std::vector<std::string>& names, const TypeEnv& env,
                             const std::string& block, const char* what) {
  std::vector<VarDecl> out;
  NameSet seen;
  for (const auto& n : names) {
    const auto it = env.find(n);
    if (it == env.end()) {
      throw RefineError(std::string(what) + " variable '" + n + "' of block " + block +
                        " is not in scope");
    }
    if (seen.insert(n).second) out.push_back({n, it->second});
  }
  return out;
}

std::vector<VarDecl> frame_vars(const BlockDecl& b) {
  std::vector<VarDecl> out = b.accessible;
  for (const auto& v : b.assignable) {
    if (std::none_of(out.begin(), out.end(), [&](const VarDecl& a) { return a.name == v.name; })) {
      out.push_back(v);
    }
  }
  return out;
}

void check_contract(const std::string& name, const Predicate& pre, const Predicate& post,
                    const std::vector<VarDecl>& frame) {
  if (mentions_old(pre) || mentions_old(post)) {
    throw RefineError("contract of block " + name + " may not use old()");
  }
  const TypeEnv env = type_env(frame);
  for (const auto* p : {&pre, &post}) {
    for (const auto& v : free_vars(*p)) {
      if (!env.count(v)) {
        throw RefineError("contract of block " + name + " mentions '" + v +
                          "', which is neither accessible nor assignable");
      }
    }
    check_sorts(*p, env);
  }
}

void check_unused(const MethodUnit& u, const std::string& name) {
  if (u.block(name)) throw RefineError("duplicate block name " + name);
}

struct RefFinder {
  std::map<std::string, const stmt::BlockRef*, std::less<>> refs;
  void walk(const Statement& s) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, stmt::BlockRef>) {
            refs[n.name] = &n;
          } else if constexpr (std::is_same_v<T, stmt::Seq>) {
            walk(n.first);
            walk(n.second);
          } else if constexpr (std::is_same_v<T, stmt::Select>) {
            for (const auto& b : n.branches) walk(b.body);
          } else if constexpr (std::is_same_v<T, stmt::Repeat>) {
            walk(n.body);
          }
        },
        s.node().v);
  }
};

std::string renamed_name(const Renaming& r, const std::string& n) {
  for (const auto& [from, to] : r) {
    if (from == n) return to;
  }
  return n;
}

}  // namespace

MethodUnit introduce_block(const MethodUnit& u, const std::string& node, const std::string& name,
                           const Predicate& pre, const Predicate& post,
                           const std::vector<std::string>& accessible,
                           const std::vector<std::string>& assignable) {
  MethodUnit out = u;
  RefinementNode& n = open_node(out, node);
  check_unused(out, name);
  const TypeEnv env = type_env(out.declared());
  BlockDecl b;
  b.name = name;
  b.accessible = resolve(accessible, env, name, "accessible");
  b.assignable = resolve(assignable, env, name, "assignable");
  for (const auto& v : b.assignable) {
    if (std::any_of(out.params.begin(), out.params.end(),
                    [&](const VarDecl& p) { return p.name == v.name; })) {
      throw RefineError("parameter '" + v.name + "' is read-only");
    }
  }
  b.contract = {ground_result(pre), ground_result(post)};
  check_contract(name, b.contract.pre, b.contract.post, frame_vars(b));
  b.origin = node;
  n.stmt = block_ref(name, b.contract.pre, b.contract.post);
  n.rule = RuleRecord{"block", name};
  n.obligations.push_back(
      obligation(node + ".block-pre", "block introduction at " + node, n.pre, b.contract.pre));
  n.obligations.push_back(
      obligation(node + ".block-post", "block introduction at " + node, b.contract.post, n.post));
  out.blocks.push_back(std::move(b));
  return out;
}

MethodUnit instantiate_block(const MethodUnit& u, const std::string& name, const Statement& stmts,
                             const std::vector<BlockFrameDecl>& nested) {
  MethodUnit out = u;
  const BlockDecl* found = out.block(name);
  if (!found) throw RefineError("no block " + name + " in method " + out.name);
  if (found->instantiation) throw RefineError("block " + name + " is already instantiated");
  if (contains_abstract(stmts)) {
    throw RefineError("instantiation of block " + name + " contains an abstract statement");
  }
  const std::size_t index = static_cast<std::size_t>(found - out.blocks.data());
  const std::vector<VarDecl> frame = frame_vars(*found);

  NameSet taken;
  for (const auto& v : out.declared()) taken.insert(v.name);
  for (const auto& b : out.blocks) {
    for (const auto& v : b.locals) taken.insert(v.name);
  }
  auto [renamed, renaming] = alpha_rename(stmts, taken);

  std::vector<VarDecl> locals;
  for (const auto& [n, t] : local_decls(renamed)) {
    if (std::none_of(locals.begin(), locals.end(), [&](const VarDecl& v) { return v.name == n; })) {
      locals.push_back({n, t});
    }
  }
  std::vector<VarDecl> scope = frame;
  scope.insert(scope.end(), locals.begin(), locals.end());
  const TypeEnv env = type_env(scope);

  for (const auto& v : free_vars(renamed)) {
    if (!env.count(v)) {
      throw RefineError("block " + name + " reads '" + v + "', which is not accessible");
    }
  }
  NameSet writable;
  for (const auto& v : found->assignable) writable.insert(v.name);
  for (const auto& v : locals) writable.insert(v.name);
  for (const auto& v : assigned_vars(renamed)) {
    if (v == "result") throw RefineError("block " + name + " may not return");
    if (!writable.count(v)) {
      throw RefineError("block " + name + " assigns '" + v + "', which is not assignable");
    }
  }

  RefFinder refs;
  refs.walk(renamed);
  std::vector<BlockDecl> spawned;
  NameSet spawned_names;
  for (const auto& f : nested) {
    check_unused(out, f.name);
    if (f.name == name || !spawned_names.insert(f.name).second) {
      throw RefineError("duplicate block name " + f.name);
    }
    const auto it = refs.refs.find(f.name);
    if (it == refs.refs.end()) {
      throw RefineError("block " + f.name + " does not occur in the instantiation of " + name);
    }
    std::vector<std::string> acc;
    std::vector<std::string> asg;
    for (const auto& a : f.accessible) acc.push_back(renamed_name(renaming, a));
    for (const auto& a : f.assignable) {
      const std::string r = renamed_name(renaming, a);
      if (!writable.count(r)) {
        throw RefineError("block " + f.name + " assigns '" + a + "', which " + name +
                          " may not assign");
      }
      asg.push_back(r);
    }
    BlockDecl b;
    b.name = f.name;
    b.accessible = resolve(acc, env, f.name, "accessible");
    b.assignable = resolve(asg, env, f.name, "assignable");
    b.contract = {ground_result(it->second->pre), ground_result(it->second->post)};
    check_contract(f.name, b.contract.pre, b.contract.post, frame_vars(b));
    b.origin = name;
    spawned.push_back(std::move(b));
  }
  for (const auto& [ref, _] : refs.refs) {
    if (!spawned_names.count(ref)) {
      throw RefineError("block " + ref + " in the instantiation of " + name + " has no frame");
    }
  }

  out.blocks.insert(out.blocks.end(), spawned.begin(), spawned.end());
  BlockDecl& b = out.blocks[index];
  b.instantiation = stmts;
  b.renamed = renamed;
  b.renaming = renaming;
  b.locals = locals;

  WpContext ctx;
  ctx.methods = &out.callees;
  ctx.frames = block_frames(out);
  for (const auto& v : scope) ctx.types[v.name] = v.type;
  ctx.taken = taken_names(out);
  const std::string prov = "instantiation of block " + name;
  try {
    const WpResult w = wp(renamed, b.contract.post, ctx);
    b.obligations.push_back(obligation(name + ".instantiation", prov, b.contract.pre, w.pre, scope));
    int k = 0;
    for (const auto& s : w.sides) {
      std::vector<VarDecl> extra = scope;
      extra.insert(extra.end(), s.extra.begin(), s.extra.end());
      b.obligations.push_back(obligation(
          name + ".instantiation." + sanitize(s.label) + "." + std::to_string(k++),
          s.label + " in " + prov, s.hypothesis, s.conclusion, extra));
    }
  } catch (const WpError& e) {
    throw RefineError("block " + name + ": " + e.what());
  }
  return out;
}

BlockMethod block_to_method(const MethodUnit& u, const std::string& name) {
  const BlockDecl* b = u.block(name);
  if (!b) throw RefineError("no block " + name + " in method " + u.name);
  if (!b->renamed) throw RefineError("block " + name + " is not instantiated");
  BlockMethod m;
  m.name = u.name + "$" + name;
  m.params = b->accessible;
  m.state = b->assignable;
  m.contract = {b->contract.pre, resolve_old(b->contract.post)};
  m.body = *b->renamed;
  m.renaming = b->renaming;
  return m;
}

std::map<std::string, BlockFrame, std::less<>> block_frames(const MethodUnit& u) {
  std::map<std::string, BlockFrame, std::less<>> out;
  for (const auto& b : u.blocks) out[b.name] = {b.accessible, b.assignable};
  return out;
}

Statement inline_block(const MethodUnit& u, const std::string& name) {
  const BlockDecl* b = u.block(name);
  if (!b) throw RefineError("no block " + name + " in method " + u.name);
  if (!b->renamed) return block_ref(name, b->contract.pre, b->contract.post);
  return replace_holes(*b->renamed, [&](const Statement& h) -> Statement {
    if (const auto* r = h.as<stmt::BlockRef>()) return inline_block(u, r->name);
    return h;
  });
}

}  // namespace cbc
