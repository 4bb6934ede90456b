#include <algorithm>

#include "cbc/kernel/print.hpp"
#include "cbc/kernel/syntax.hpp"
#include "cbc/traits/calculus.hpp"
#include "detail.hpp"

namespace cbc::traits {

namespace {

Predicate atom_of(const Expr& e) {
  if (const auto* b = e.as<expr::BoolLit>()) return b->value ? p_true() : p_false();
  return atom(e);
}

/// A subexpression after typing: its sort, a total term for its value (defined
/// whenever the obligation holds), knowledge about the call results it
/// introduced and the obligation that makes it safe to evaluate.
struct Term {
  Type type;
  Expr value;
  Predicate knowledge;
  Predicate obligation;
};

class Typer {
 public:
  Typer(const FlatTable& ds, const Gamma& gamma, NameSet taken)
      : ds_(ds), gamma_(gamma), taken_(std::move(taken)) {}

  /// Set while verifying `self` of `owner`, to recognise direct recursion.
  const Method* self = nullptr;
  std::string owner;
  std::vector<VarDecl> fresh;

  Term type(const Expr& e) {
    return std::visit([&](const auto& n) { return rule(n, e); }, e.node().v);
  }

 private:
  Term rule(const expr::IntLit&, const Expr& e) { return {Type::integer(), e, p_true(), p_true()}; }
  Term rule(const expr::BoolLit&, const Expr& e) { return {Type::boolean(), e, p_true(), p_true()}; }

  Term rule(const expr::Var& n, const Expr& e) {
    const auto it = gamma_.find(n.name);
    if (it == gamma_.end()) throw TraitTypeError("unknown variable '" + n.name + "'");
    return {it->second, e, p_true(), p_true()};
  }

  Term rule(const expr::Old&, const Expr& e) {
    throw TraitTypeError("old(..) is not an expression of method bodies: " + print(e));
  }
  Term rule(const expr::Result&, const Expr&) {
    throw TraitTypeError("result is not an expression of method bodies");
  }

  Term rule(const expr::Binary& n, const Expr& e) {
    Term l = type(n.lhs);
    Term r = type(n.rhs);
    const std::string what = print(e);
    auto want = [&](const Term& t, Type::Kind k) {
      if (t.type.kind != k) {
        throw TraitTypeError("operand of '" + what + "' has sort " + detail::type_label(t.type));
      }
    };
    Type out = Type::boolean();
    Predicate def = p_true();
    switch (n.op) {
      case BinOp::Add:
      case BinOp::Sub:
      case BinOp::Mul:
      case BinOp::Div:
        want(l, Type::Kind::Int);
        want(r, Type::Kind::Int);
        out = Type::integer();
        if (n.op == BinOp::Div) def = atom(binary(BinOp::Ne, r.value, int_lit(0)));
        break;
      case BinOp::Lt:
      case BinOp::Le:
      case BinOp::Gt:
      case BinOp::Ge:
        want(l, Type::Kind::Int);
        want(r, Type::Kind::Int);
        break;
      case BinOp::Eq:
      case BinOp::Ne:
        if (!ds_.subtype(l.type, r.type) && !ds_.subtype(r.type, l.type)) {
          throw TraitTypeError("operands of '" + what + "' have different sorts");
        }
        break;
      case BinOp::And:
      case BinOp::Or: {
        want(l, Type::Kind::Bool);
        want(r, Type::Kind::Bool);
        // The right operand only runs when the left one does not decide.
        const Predicate runs = n.op == BinOp::And ? atom_of(l.value) : p_not(atom_of(l.value));
        return {out, binary(n.op, l.value, r.value),
                conj({l.knowledge, detail::guarded(conj({l.obligation, runs}), r.knowledge)}),
                conj({l.obligation, detail::guarded(runs, r.obligation)})};
      }
    }
    return {out, binary(n.op, l.value, r.value), conj({l.knowledge, r.knowledge}),
            conj({l.obligation, r.obligation, def})};
  }

  Term rule(const expr::Not& n, const Expr& e) {
    Term t = type(n.inner);
    if (t.type.kind != Type::Kind::Bool) throw TraitTypeError("'" + print(e) + "' negates a non-boolean");
    return {Type::boolean(), not_(t.value), t.knowledge, t.obligation};
  }

  Term rule(const expr::SeqLit& n, const Expr&) {
    std::vector<Expr> vals;
    std::vector<Predicate> k;
    std::vector<Predicate> o;
    for (const auto& x : n.elems) {
      Term t = type(x);
      if (t.type.kind != Type::Kind::Int) throw TraitTypeError("list elements must be Num");
      vals.push_back(t.value);
      k.push_back(t.knowledge);
      o.push_back(t.obligation);
    }
    return {Type::sequence(), seq_lit(std::move(vals)), conj(std::move(k)), conj(std::move(o))};
  }

  Term rule(const expr::SeqOp& n, const Expr& e) {
    Term r = type(n.receiver);
    if (r.type.kind != Type::Kind::Seq) {
      throw TraitTypeError("'" + print(e) + "' needs a List receiver");
    }
    std::optional<Term> a;
    if (n.arg) {
      a = type(*n.arg);
      if (a->type.kind != Type::Kind::Int) throw TraitTypeError("'" + print(e) + "' needs a Num argument");
    }
    const Expr size = seq_op(SeqOpKind::Size, r.value);
    Predicate def = p_true();
    Type out = Type::integer();
    switch (n.op) {
      case SeqOpKind::Size: break;
      case SeqOpKind::Get:
        def = conj({atom(binary(BinOp::Le, int_lit(0), a->value)), atom(binary(BinOp::Lt, a->value, size))});
        break;
      case SeqOpKind::Contains: out = Type::boolean(); break;
      case SeqOpKind::Element: def = atom(binary(BinOp::Gt, size, int_lit(0))); break;
      case SeqOpKind::Tail:
        def = atom(binary(BinOp::Gt, size, int_lit(0)));
        out = Type::sequence();
        break;
    }
    const Expr value = seq_op(n.op, r.value, a ? std::optional<Expr>(a->value) : std::nullopt);
    return {out, value, conj({r.knowledge, a ? a->knowledge : p_true()}),
            conj({r.obligation, a ? a->obligation : p_true(), def})};
  }

  Term rule(const expr::Call& n, const Expr& e) {
    Term recv = type(n.receiver);
    if (recv.type.kind != Type::Kind::Object) {
      throw TraitTypeError("cannot call '" + n.method + "' on a value of sort " + detail::type_label(recv.type));
    }
    const Method* m = ds_.method(recv.type.cls, n.method);
    if (!m) throw TraitTypeError("unknown method " + recv.type.cls + "." + n.method);
    if (m->params.size() != n.args.size()) {
      throw TraitTypeError("'" + print(e) + "' passes " + std::to_string(n.args.size()) +
                           " arguments to a method of " + std::to_string(m->params.size()));
    }
    std::vector<Predicate> k{recv.knowledge};
    std::vector<Predicate> o{recv.obligation};
    std::vector<std::pair<std::string, Expr>> subst{{"this", recv.value}};
    for (std::size_t i = 0; i < n.args.size(); ++i) {
      Term a = type(n.args[i]);
      if (!ds_.subtype(a.type, m->params[i].type)) {
        throw TraitTypeError("argument " + std::to_string(i + 1) + " of '" + print(e) + "' has sort " +
                             detail::type_label(a.type) + ", expected " + detail::type_label(m->params[i].type));
      }
      k.push_back(a.knowledge);
      o.push_back(a.obligation);
      subst.emplace_back(m->params[i].name, a.value);
    }
    // A getter reads a field, so it stands for itself.
    const Expr value = m->is_getter() ? call(recv.value, n.method, {}) : var(fresh_var(n.method, m->ret));
    const Predicate pre = substitute_all(m->spec.pre, subst);
    const Predicate post = substitute(substitute_all(m->spec.post, subst), SubstTarget::result(), value);
    const Predicate args_ok = conj(o);
    k.push_back(detail::guarded(args_ok, implies(pre, post)));
    o.push_back(pre);
    if (self && n.method == self->name && recv.type.cls == owner) {
      if (!self->measure) {
        throw TraitTypeError("recursive call '" + print(e) + "' needs a @Decreases measure on " + self->name);
      }
      const Expr now = *self->measure;
      const Expr next = substitute_all(now, subst);
      o.push_back(atom(binary(BinOp::Le, int_lit(0), next)));
      o.push_back(atom(binary(BinOp::Lt, next, now)));
    }
    return {m->ret, value, conj(std::move(k)), conj(std::move(o))};
  }

  Term rule(const expr::New& n, const Expr& e) {
    std::vector<Term> args;
    for (const auto& a : n.args) args.push_back(type(a));
    std::vector<Predicate> k;
    std::vector<Predicate> o;
    std::vector<Expr> vals;
    for (const auto& a : args) {
      k.push_back(a.knowledge);
      o.push_back(a.obligation);
      vals.push_back(a.value);
    }
    if (n.cls == "Nil" || n.cls == "Cons") {
      const bool cons = n.cls == "Cons";
      if (args.size() != (cons ? 2u : 0u) ||
          (cons && (args[0].type.kind != Type::Kind::Int || args[1].type.kind != Type::Kind::Seq))) {
        throw TraitTypeError("'" + print(e) + "' does not build a List");
      }
      return {Type::sequence(), cons ? new_("Cons", vals) : seq_lit({}), conj(k), conj(o)};
    }
    const FlatDecl* d = ds_.find(n.cls);
    if (!d) throw TraitTypeError("unknown class " + n.cls);
    if (!d->is_class) throw TraitTypeError(n.cls + " is not a class and cannot be instantiated");
    const auto getters = ds_.getters(n.cls);
    if (getters.size() != args.size()) {
      throw TraitTypeError("'" + print(e) + "' passes " + std::to_string(args.size()) + " arguments, " + n.cls +
                           " has " + std::to_string(getters.size()) + " getters");
    }
    const Expr obj = new_(n.cls, vals);
    const Predicate args_ok = conj(o);
    for (std::size_t i = 0; i < getters.size(); ++i) {
      if (!ds_.subtype(args[i].type, getters[i]->ret)) {
        throw TraitTypeError("argument " + std::to_string(i + 1) + " of '" + print(e) + "' does not fit getter " +
                             getters[i]->name);
      }
      const Predicate pre = substitute(getters[i]->spec.pre, "this", obj);
      k.push_back(detail::guarded(args_ok, implies(pre, atom(binary(BinOp::Eq, call(obj, getters[i]->name, {}), vals[i])))));
      o.push_back(pre);
    }
    return {Type::object(n.cls), obj, conj(std::move(k)), conj(std::move(o))};
  }

  Term rule(const expr::Ite& n, const Expr& e) {
    Term c = type(n.cond);
    if (c.type.kind != Type::Kind::Bool) throw TraitTypeError("condition of '" + print(e) + "' is not boolean");
    Term a = type(n.then_branch);
    Term b = type(n.else_branch);
    Type out = a.type;
    if (ds_.subtype(a.type, b.type)) {
      out = b.type;
    } else if (!ds_.subtype(b.type, a.type)) {
      throw TraitTypeError("branches of '" + print(e) + "' have unrelated sorts");
    }
    const Predicate yes = atom_of(c.value);
    const Predicate no = p_not(yes);
    return {out, ite(c.value, a.value, b.value),
            conj({c.knowledge, detail::guarded(conj({c.obligation, yes}), a.knowledge),
                  detail::guarded(conj({c.obligation, no}), b.knowledge)}),
            conj({c.obligation, detail::guarded(yes, a.obligation), detail::guarded(no, b.obligation)})};
  }

  std::string fresh_var(const std::string& base, const Type& t) {
    std::string n = fresh_name(base, taken_);
    taken_.insert(n);
    fresh.push_back({n, t});
    return n;
  }

  const FlatTable& ds_;
  const Gamma& gamma_;
  NameSet taken_;
};

NameSet expr_names(const Expr& e) { return all_names(atom(e)); }

}  // namespace

namespace detail {

std::string type_label(const Type& t) {
  switch (t.kind) {
    case Type::Kind::Int: return "Num";
    case Type::Kind::Bool: return "Bool";
    default: return to_string(t);
  }
}

Predicate guarded(const Predicate& g, const Predicate& p) {
  if (g.is<pred::True>() || p.is<pred::True>()) return p;
  if (const auto* a = p.as<pred::And>()) {
    std::vector<Predicate> parts;
    for (const auto& q : a->parts) parts.push_back(guarded(g, q));
    return conj(std::move(parts));
  }
  if (const auto* im = p.as<pred::Implies>()) return implies(conj({g, im->lhs}), im->rhs);
  return implies(g, p);
}

ClassFields class_fields(const FlatTable& ds, const std::vector<VarDecl>& vars) {
  ClassFields out;
  std::vector<Type> todo;
  for (const auto& v : vars) todo.push_back(v.type);
  while (!todo.empty()) {
    const Type t = todo.back();
    todo.pop_back();
    if (t.kind != Type::Kind::Object || out.count(t.cls)) continue;
    auto& fields = out[t.cls];
    for (const Method* g : ds.getters(t.cls)) {
      fields.push_back({g->name, g->ret});
      todo.push_back(g->ret);
    }
  }
  return out;
}

}  // namespace detail

Typed type_expr(const Gamma& gamma, const Expr& e, const FlatTable& ds) {
  NameSet taken = expr_names(e);
  for (const auto& [n, t] : gamma) taken.insert(n);
  taken.insert("result");
  Typer typer(ds, gamma, taken);
  const Term t = typer.type(e);
  const Predicate k =
      conj({t.knowledge, detail::guarded(t.obligation, atom(binary(BinOp::Eq, result(), t.value)))});
  return {t.type, k, t.obligation, typer.fresh};
}

Obligation method_obligation(const FlatTable& ds, const std::string& owner, const Method& m) {
  if (!m.body) throw TraitTypeError(owner + "." + m.name + " is abstract");
  Gamma gamma{{"this", Type::object(owner)}};
  for (const auto& p : m.params) {
    if (p.name == "this") throw TraitTypeError("parameter of " + m.name + " is called this");
    gamma[p.name] = p.type;
  }
  NameSet taken = expr_names(*m.body);
  for (const auto* p : {&m.spec.pre, &m.spec.post}) {
    for (const auto& n : all_names(*p)) taken.insert(n);
  }
  for (const auto& [n, t] : gamma) taken.insert(n);
  taken.insert("result");
  Typer typer(ds, gamma, taken);
  typer.self = &m;
  typer.owner = owner;
  const Term t = typer.type(*m.body);
  if (!ds.subtype(t.type, m.ret)) {
    throw TraitTypeError("body of " + owner + "." + m.name + " has sort " + detail::type_label(t.type) +
                         ", declared " + detail::type_label(m.ret));
  }
  const Expr res = var("result");
  const Predicate post = substitute(m.spec.post, SubstTarget::result(), res);
  Obligation ob;
  ob.id = owner + "." + m.name;
  ob.provenance = "verification of " + owner + "." + m.name;
  ob.hypothesis = conj({m.spec.pre, t.knowledge, detail::guarded(t.obligation, atom(binary(BinOp::Eq, res, t.value)))});
  ob.conclusion = conj({t.obligation, post});
  NameSet used = free_vars(ob.hypothesis);
  for (const auto& v : free_vars(ob.conclusion)) used.insert(v);
  if (used.count("this")) ob.vars.push_back({"this", Type::object(owner)});
  for (const auto& p : m.params) ob.vars.push_back({p.name, p.type});
  for (const auto& f : typer.fresh) ob.vars.push_back(f);
  ob.vars.push_back({"result", m.ret});
  ob.classes = detail::class_fields(ds, ob.vars);
  return ob;
}

ProofResult verify_method(const FlatTable& ds, const std::string& owner, const Method& m,
                          const ProverConfig& cfg) {
  if (m.is_abstract()) return ProofResult::valid();
  try {
    return check_implication(method_obligation(ds, owner, m), cfg);
  } catch (const TraitTypeError& e) {
    return ProofResult::unknown(std::string("type error: ") + e.what());
  } catch (const EvalError& e) {
    return ProofResult::unknown(e.what());
  }
}

bool BodyCheck::ok() const {
  return std::all_of(methods.begin(), methods.end(), [](const MethodCheck& c) { return c.result.is_valid(); });
}

std::vector<std::string> BodyCheck::failed() const {
  std::vector<std::string> out;
  for (const auto& c : methods) {
    if (!c.result.is_valid()) out.push_back(c.method);
  }
  return out;
}

BodyCheck check_body(const FlatTable& ds, const std::string& owner, const Body& body, const ProverConfig& cfg) {
  BodyCheck out;
  for (const auto& m : body.methods) out.methods.push_back({owner, m.name, verify_method(ds, owner, m, cfg)});
  return out;
}

}  // namespace cbc::traits
