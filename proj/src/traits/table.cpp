#include <algorithm>
#include <functional>
#include <set>

#include "cbc/kernel/syntax.hpp"
#include "cbc/traits/calculus.hpp"
#include "detail.hpp"

namespace cbc::traits {

namespace {

TraitExpr mk(decltype(TraitExprNode::v) v) { return std::make_shared<const TraitExprNode>(TraitExprNode{std::move(v)}); }

bool same_signature(const Method& a, const Method& b) {
  if (!(a.ret == b.ret) || a.params.size() != b.params.size()) return false;
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    if (!(a.params[i].type == b.params[i].type)) return false;
  }
  return true;
}

/// The specification of `from` with its parameters renamed to those of `to`.
Contract spec_in(const Method& from, const Method& to) {
  std::vector<std::pair<std::string, Expr>> subst;
  for (std::size_t i = 0; i < from.params.size(); ++i) {
    if (from.params[i].name != to.params[i].name) subst.emplace_back(from.params[i].name, var(to.params[i].name));
  }
  return {substitute_all(from.spec.pre, subst), substitute_all(from.spec.post, subst)};
}

ProofResult implication(const Predicate& h, const Predicate& c, const Method& m, const ComposeEnv& env,
                        const std::string& what) {
  Obligation ob;
  ob.id = env.owner.empty() ? m.name : env.owner + "." + m.name;
  ob.id += "." + what;
  ob.provenance = what + " of " + m.name;
  ob.hypothesis = substitute(h, SubstTarget::result(), var("result"));
  ob.conclusion = substitute(c, SubstTarget::result(), var("result"));
  NameSet used = free_vars(ob.hypothesis);
  for (const auto& v : free_vars(ob.conclusion)) used.insert(v);
  if (used.count("this")) ob.vars.push_back({"this", Type::object(env.owner.empty() ? "This" : env.owner)});
  for (const auto& p : m.params) ob.vars.push_back({p.name, p.type});
  if (used.count("result")) ob.vars.push_back({"result", m.ret});
  if (env.table) ob.classes = detail::class_fields(*env.table, ob.vars);
  try {
    return check_implication(ob, env.cfg);
  } catch (const EvalError& e) {
    return ProofResult::unknown(e.what());
  }
}

/// Does `s` (the surviving specification, as a method) refine `s2`?
CompositionCheck refines(const Method& s, const Method& s2, const ComposeEnv& env) {
  const Contract other = spec_in(s2, s);
  CompositionCheck c{env.owner, s.name, implication(other.pre, s.spec.pre, s, env, "pre"),
                     implication(s.spec.post, other.post, s, env, "post")};
  if (env.log) env.log->push_back(c);
  return c;
}

const Assignment& first_cex(const CompositionCheck& c) {
  return c.pre.is_valid() ? c.post.counterexample : c.pre.counterexample;
}

std::string describe(const CompositionCheck& c) {
  std::string out;
  if (!c.pre.is_valid()) out += "precondition " + std::string(to_string(c.pre.kind)) + " at " + format_assignment(c.pre.counterexample);
  if (!c.post.is_valid()) {
    if (!out.empty()) out += ", ";
    out += "postcondition " + std::string(to_string(c.post.kind)) + " at " + format_assignment(c.post.counterexample);
  }
  return out;
}

}  // namespace

TraitExpr lit(Body b) { return mk(texpr::Lit{std::move(b)}); }
TraitExpr ref(std::string name) { return mk(texpr::Ref{std::move(name)}); }
TraitExpr plus(TraitExpr lhs, TraitExpr rhs) { return mk(texpr::Plus{std::move(lhs), std::move(rhs)}); }
TraitExpr make_abstract(TraitExpr inner, std::string method) {
  return mk(texpr::MakeAbstract{std::move(inner), std::move(method)});
}

const Method* Body::find(std::string_view name) const {
  for (const auto& m : methods) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

const Decl* TraitTable::find(std::string_view name) const {
  for (const auto& d : decls) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const FlatDecl* FlatTable::find(std::string_view name) const {
  for (const auto& d : decls) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

const Method* FlatTable::method(std::string_view owner, std::string_view m) const {
  const FlatDecl* d = find(owner);
  return d ? d->body.find(m) : nullptr;
}

std::vector<const Method*> FlatTable::getters(std::string_view owner) const {
  std::vector<const Method*> out;
  if (const FlatDecl* d = find(owner)) {
    for (const auto& m : d->body.methods) {
      if (m.is_getter()) out.push_back(&m);
    }
  }
  return out;
}

bool FlatTable::instance_of(std::string_view sub, std::string_view super) const {
  std::set<std::string, std::less<>> seen;
  std::vector<std::string> todo{std::string(sub)};
  while (!todo.empty()) {
    const std::string n = todo.back();
    todo.pop_back();
    if (n == super) return true;
    if (!seen.insert(n).second) continue;
    if (const FlatDecl* d = find(n)) todo.insert(todo.end(), d->body.interfaces.begin(), d->body.interfaces.end());
  }
  return false;
}

bool FlatTable::subtype(const Type& sub, const Type& super) const {
  if (sub == super) return true;
  return sub.kind == Type::Kind::Object && super.kind == Type::Kind::Object && instance_of(sub.cls, super.cls);
}

// ------------------------------------------------------------- well-formedness

std::vector<Diagnostic> well_formed(const TraitTable& ds) {
  std::vector<Diagnostic> out;
  std::set<std::string, std::less<>> names;
  for (const auto& d : ds.decls) {
    const std::string at = d.where.empty() ? d.name : d.where;
    if (!names.insert(d.name).second) out.push_back({at, "name " + d.name + " is declared twice"});
  }

  std::function<void(const TraitExpr&, const Decl&, std::vector<std::string>&)> refs_of;
  refs_of = [&](const TraitExpr& e, const Decl& d, std::vector<std::string>& refs) {
    const std::string at = d.where.empty() ? d.name : d.where;
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, texpr::Lit>) {
            std::set<std::string, std::less<>> cs;
            for (const auto& c : n.body.interfaces) {
              if (!cs.insert(c).second) out.push_back({at, "interface " + c + " is listed twice in " + d.name});
            }
            std::set<std::string, std::less<>> ms;
            for (const auto& m : n.body.methods) {
              if (!ms.insert(m.name).second) out.push_back({at, "method " + m.name + " is declared twice in " + d.name});
              std::set<std::string, std::less<>> ps;
              for (const auto& p : m.params) {
                if (p.name == "this") out.push_back({at, "parameter of " + d.name + "." + m.name + " is called this"});
                if (!ps.insert(p.name).second) {
                  out.push_back({at, "parameter " + p.name + " of " + d.name + "." + m.name + " is declared twice"});
                }
              }
            }
          } else if constexpr (std::is_same_v<T, texpr::Ref>) {
            refs.push_back(n.name);
            if (!ds.find(n.name)) out.push_back({at, d.name + " refers to unknown trait " + n.name});
          } else if constexpr (std::is_same_v<T, texpr::Plus>) {
            refs_of(n.lhs, d, refs);
            refs_of(n.rhs, d, refs);
          } else {
            refs_of(n.inner, d, refs);
          }
        },
        e->v);
  };

  std::map<std::string, std::vector<std::string>, std::less<>> graph;
  for (const auto& d : ds.decls) {
    auto& refs = graph[d.name];
    if (d.expr) refs_of(d.expr, d, refs);
  }
  // Cycles in the trait-reference graph, each reported once at its first member.
  std::map<std::string, int, std::less<>> state;
  std::vector<std::string> stack;
  std::function<void(const std::string&)> visit = [&](const std::string& n) {
    state[n] = 1;
    stack.push_back(n);
    for (const auto& r : graph[n]) {
      if (!graph.count(r)) continue;
      if (state[r] == 1) {
        const auto from = std::find(stack.begin(), stack.end(), r);
        std::string cycle;
        for (auto it = from; it != stack.end(); ++it) cycle += *it + " -> ";
        const Decl* d = ds.find(r);
        out.push_back({d && !d->where.empty() ? d->where : r, "circular trait definition " + cycle + r});
      } else if (state[r] == 0) {
        visit(r);
      }
    }
    stack.pop_back();
    state[n] = 2;
  };
  for (const auto& d : ds.decls) {
    if (state[d.name] == 0) visit(d.name);
  }
  return out;
}

// ---------------------------------------------------------------- composition

Method compose_method(const Method& m1, const Method& m2, const ComposeEnv& env) {
  if (m1.name != m2.name) throw TraitError("cannot compose " + m1.name + " with " + m2.name);
  if (!same_signature(m1, m2)) throw TraitError("methods " + m1.name + " have different signatures");
  if (!m1.is_abstract() && !m2.is_abstract()) {
    throw ConflictError("two implementations of " + m1.name + (env.owner.empty() ? "" : " in " + env.owner));
  }
  const std::string where = env.owner.empty() ? m1.name : env.owner + "." + m1.name;
  if (m1.is_abstract() && !m2.is_abstract()) {
    // Symmetric case: the concrete method decides the header.
    return compose_method(m2, m1, env);
  }
  const CompositionCheck keep_first = refines(m1, m2, env);
  if (keep_first.ok()) return m1;
  if (!m1.is_abstract()) {
    throw SpecIncompatible("implementation of " + where + " does not respect the abstract specification: " +
                               describe(keep_first),
                           first_cex(keep_first));
  }
  const CompositionCheck keep_second = refines(m2, m1, env);
  if (keep_second.ok()) {
    Method out = m1;
    out.spec = spec_in(m2, m1);
    return out;
  }
  throw SpecIncompatible("abstract specifications of " + where + " are incompatible: " + describe(keep_first),
                         first_cex(keep_first));
}

Body compose_bodies(const Body& b1, const Body& b2, const ComposeEnv& env) {
  Body out;
  out.is_interface = b1.is_interface && b2.is_interface;
  out.interfaces = b1.interfaces;
  for (const auto& c : b2.interfaces) {
    if (std::find(out.interfaces.begin(), out.interfaces.end(), c) == out.interfaces.end()) out.interfaces.push_back(c);
  }
  for (const auto& m : b1.methods) {
    const Method* other = b2.find(m.name);
    out.methods.push_back(other ? compose_method(m, *other, env) : m);
  }
  for (const auto& m : b2.methods) {
    if (!b1.find(m.name)) out.methods.push_back(m);
  }
  return out;
}

Body make_abstract(const Body& b, const std::string& m) {
  Body out = b;
  for (auto& x : out.methods) {
    if (x.name == m) {
      x.body.reset();
      x.measure.reset();
      return out;
    }
  }
  throw TraitError("makeAbstract " + m + ": no such method");
}

std::vector<Method> all_meth(const std::string& m, const std::vector<Body>& bodies) {
  std::vector<Method> out;
  for (const auto& b : bodies) {
    if (const Method* x = b.find(m)) {
      if (std::find(out.begin(), out.end(), *x) == out.end()) out.push_back(*x);
    }
  }
  return out;
}

// ----------------------------------------------------------------- flattening

namespace {

struct FlattenError : TraitError {
  using TraitError::TraitError;
};

class Flattener {
 public:
  Flattener(const TraitTable& ds, const ProverConfig& cfg, Flattening& out) : ds_(ds), cfg_(cfg), out_(out) {}

  void run() {
    out_.errors = well_formed(ds_);
    if (!out_.errors.empty()) return;
    shapes();
    // Pass 1: compose every declaration, checking specification refinement.
    for (const auto& d : ds_.decls) {
      try {
        const Body& b = flatten(d.name);
        out_.table.decls.push_back({d.name, d.is_class, b});
      } catch (const TraitError&) {
        // Already reported where it happened.
      }
    }
    // Pass 2: verify the body literals against the completed table.
    for (const auto& d : ds_.decls) {
      if (!out_.table.find(d.name)) continue;
      verify_literals(d, d.expr);
      if (d.is_class) check_instantiable(d);
    }
  }

 private:
  std::string at(const Decl& d) const { return d.where.empty() ? d.name : d.where; }

  [[noreturn]] void fail(const Decl& d, const std::string& msg) {
    out_.errors.push_back({at(d), d.name + ": " + msg});
    throw FlattenError(msg);
  }

  /// Structural flattening without any checks, so that getter sorts of
  /// every name are known before compositions are proved.
  void shapes() {
    std::function<Body(const TraitExpr&, int)> shape = [&](const TraitExpr& e, int depth) -> Body {
      if (depth > 64) return {};
      return std::visit(
          [&](const auto& n) -> Body {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, texpr::Lit>) {
              return n.body;
            } else if constexpr (std::is_same_v<T, texpr::Ref>) {
              const Decl* d = ds_.find(n.name);
              return d ? shape(d->expr, depth + 1) : Body{};
            } else if constexpr (std::is_same_v<T, texpr::Plus>) {
              Body a = shape(n.lhs, depth + 1);
              const Body b = shape(n.rhs, depth + 1);
              for (const auto& m : b.methods) {
                Method* x = nullptr;
                for (auto& y : a.methods) {
                  if (y.name == m.name) x = &y;
                }
                if (!x) {
                  a.methods.push_back(m);
                } else if (x->is_abstract() && !m.is_abstract()) {
                  *x = m;
                }
              }
              a.interfaces.insert(a.interfaces.end(), b.interfaces.begin(), b.interfaces.end());
              return a;
            } else {
              Body a = shape(n.inner, depth + 1);
              for (auto& m : a.methods) {
                if (m.name == n.method) m.body.reset();
              }
              return a;
            }
          },
          e->v);
    };
    for (const auto& d : ds_.decls) shapes_.decls.push_back({d.name, d.is_class, shape(d.expr, 0)});
  }

  const Body& flatten(const std::string& name) {
    if (const auto it = done_.find(name); it != done_.end()) {
      if (!it->second) throw FlattenError(name + " failed to flatten");
      return *it->second;
    }
    const Decl& d = *ds_.find(name);
    done_[name] = std::nullopt;
    Body b = flatten(d.expr, d);
    done_[name] = std::move(b);
    return *done_[name];
  }

  Body flatten(const TraitExpr& e, const Decl& d) {
    return std::visit(
        [&](const auto& n) -> Body {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, texpr::Lit>) {
            return import_interfaces(n.body, d);
          } else if constexpr (std::is_same_v<T, texpr::Ref>) {
            try {
              return flatten(n.name);
            } catch (const FlattenError&) {
              fail(d, "depends on " + n.name + ", which does not flatten");
            }
          } else if constexpr (std::is_same_v<T, texpr::Plus>) {
            const Body a = flatten(n.lhs, d);
            const Body b = flatten(n.rhs, d);
            try {
              return compose_bodies(a, b, env(d));
            } catch (const TraitError& err) {
              fail(d, err.what());
            }
          } else {
            const Body a = flatten(n.inner, d);
            try {
              return make_abstract(a, n.method);
            } catch (const TraitError& err) {
              fail(d, err.what());
            }
          }
        },
        e->v);
  }

  ComposeEnv env(const Decl& d) { return {d.name, &shapes_, cfg_, &out_.compositions}; }

  Body import_interfaces(const Body& b, const Decl& d) {
    Body out = b;
    std::vector<Body> ifaces;
    for (const auto& c : b.interfaces) {
      const Decl* i = ds_.find(c);
      if (!i) fail(d, "implements unknown interface " + c);
      Body ib;
      try {
        ib = flatten(c);
      } catch (const FlattenError&) {
        fail(d, "depends on " + c + ", which does not flatten");
      }
      if (!ib.is_interface) fail(d, "implements " + c + ", which is not an interface");
      ifaces.push_back(std::move(ib));
    }
    std::vector<std::string> names;
    for (const auto& ib : ifaces) {
      for (const auto& m : ib.methods) {
        if (std::find(names.begin(), names.end(), m.name) == names.end()) names.push_back(m.name);
      }
    }
    for (const auto& name : names) {
      const auto headers = all_meth(name, ifaces);
      try {
        Method folded = headers.front();
        for (std::size_t k = 1; k < headers.size(); ++k) folded = compose_method(folded, headers[k], env(d));
        if (const Method* own = b.find(name)) {
          // The class's own method must respect the interface specification.
          Method abstract = folded;
          abstract.body.reset();
          for (auto& m : out.methods) {
            if (m.name == name) m = compose_method(*own, abstract, env(d));
          }
        } else {
          folded.body.reset();
          out.methods.push_back(folded);
        }
      } catch (const TraitError& err) {
        fail(d, err.what());
      }
    }
    return out;
  }

  void verify_literals(const Decl& d, const TraitExpr& e) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, texpr::Lit>) {
            const BodyCheck c = check_body(out_.table, d.name, n.body, cfg_);
            for (const auto& m : c.methods) {
              out_.verifications.push_back(m);
              if (!m.result.is_valid()) {
                std::string msg = d.name + "." + m.method + " is " + to_string(m.result.kind);
                if (!m.result.counterexample.empty()) msg += " at " + format_assignment(m.result.counterexample);
                if (!m.result.reason.empty()) msg += ": " + m.result.reason;
                out_.errors.push_back({at(d), msg});
              }
            }
          } else if constexpr (std::is_same_v<T, texpr::Plus>) {
            verify_literals(d, n.lhs);
            verify_literals(d, n.rhs);
          } else if constexpr (std::is_same_v<T, texpr::MakeAbstract>) {
            verify_literals(d, n.inner);
          }
        },
        e->v);
  }

  void check_instantiable(const Decl& d) {
    for (const auto& m : out_.table.find(d.name)->body.methods) {
      if (m.is_abstract() && !m.params.empty()) {
        out_.errors.push_back({at(d), "class " + d.name + " leaves " + m.name + " abstract, which is not a getter"});
      }
    }
  }

  const TraitTable& ds_;
  ProverConfig cfg_;
  Flattening& out_;
  FlatTable shapes_;
  std::map<std::string, std::optional<Body>, std::less<>> done_;
};

}  // namespace

Flattening flatten_table(const TraitTable& ds, const ProverConfig& cfg) {
  Flattening out;
  Flattener(ds, cfg, out).run();
  return out;
}

}  // namespace cbc::traits
