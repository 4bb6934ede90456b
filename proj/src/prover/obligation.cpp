#include "cbc/prover/obligation.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>

#include "cbc/kernel/syntax.hpp"

namespace cbc {

const char* to_string(ProofResult::Kind k) {
  switch (k) {
    case ProofResult::Kind::Valid: return "valid";
    case ProofResult::Kind::Invalid: return "invalid";
    case ProofResult::Kind::Unknown: return "unknown";
  }
  return "?";
}

std::string format_assignment(const Assignment& a) {
  std::string out = "{";
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (k) out += ", ";
    out += a[k].first + ": " + to_string(a[k].second);
  }
  return out + "}";
}

namespace {

// Splits a hypothesis into conjuncts whose conjunction is true exactly when
// the hypothesis is true.
void flatten(const Predicate& p, std::vector<Predicate>& out) {
  if (p.is<pred::True>()) return;
  if (const auto* a = p.as<pred::And>()) {
    for (const auto& part : a->parts) flatten(part, out);
    return;
  }
  if (const auto* at = p.as<pred::Atom>()) {
    if (const auto* b = at->expr.as<expr::Binary>(); b && b->op == BinOp::And) {
      flatten(atom(b->lhs), out);
      flatten(atom(b->rhs), out);
      return;
    }
  }
  if (const auto* im = p.as<pred::Implies>()) {
    std::vector<Predicate> rhs;
    flatten(im->rhs, rhs);
    if (rhs.size() != 1 || !(rhs[0] == im->rhs)) {
      for (const auto& r : rhs) out.push_back(implies(im->lhs, r));
      return;
    }
  }
  out.push_back(p);
}

struct Search {
  const Obligation& ob;
  Bounds bounds;
  ClassSchemas schemas;
  std::map<std::string, std::vector<Type>, std::less<>> field_types;
  EvalContext ctx;
  std::vector<std::vector<Predicate>> checks;  // conjuncts decided at each level
  std::vector<std::optional<Expr>> defs;       // v_d == e with e over earlier variables
  std::vector<std::optional<Predicate>> guards;  // g => v_d == e
  std::vector<std::vector<Value>> domains;
  Env env;
  std::optional<ProofResult> verdict;

  bool in_domain(const Value& v, const Type& t) const {
    if (v.kind != t.kind) return false;
    switch (t.kind) {
      case Type::Kind::Int: return v.i >= -bounds.int_bound && v.i <= bounds.int_bound;
      case Type::Kind::Bool: return true;
      case Type::Kind::Seq:
        if (static_cast<std::int64_t>(v.seq.size()) > bounds.max_seq_len) return false;
        return std::all_of(v.seq.begin(), v.seq.end(), [&](std::int64_t x) {
          return x >= -bounds.seq_elem_bound && x <= bounds.seq_elem_bound;
        });
      default: {
        const auto& dom = domains_for(t);
        return std::find(dom.begin(), dom.end(), v) != dom.end();
      }
    }
  }

  const std::vector<Value>& domains_for(const Type& t) const {
    for (std::size_t k = 0; k < ob.vars.size(); ++k) {
      if (ob.vars[k].type == t) return domains[k];
    }
    throw std::logic_error("no domain for sort");
  }

  bool all_true(const std::vector<Predicate>& ps) {
    for (const auto& p : ps) {
      try {
        if (!holds(p, env, ctx)) return false;
      } catch (const EvalError&) {
        return false;
      }
    }
    return true;
  }

  Assignment current() const {
    Assignment a;
    for (const auto& [n, v] : env.slots()) a.emplace_back(n, v);
    return a;
  }

  void dfs(std::size_t d) {
    if (d == ob.vars.size()) {
      try {
        if (!holds(ob.conclusion, env, ctx)) verdict = ProofResult::invalid(current());
      } catch (const EvalError& e) {
        verdict = ProofResult::unknown(std::string("conclusion undefined: ") + e.what(), current());
      }
      return;
    }
    const auto& decl = ob.vars[d];
    auto try_value = [&](Value v) {
      env.push(decl.name, std::move(v));
      if (all_true(checks[d + 1])) dfs(d + 1);
      env.pop();
    };
    bool direct = defs[d].has_value();
    if (direct && guards[d]) {
      try {
        direct = holds(*guards[d], env, ctx);
      } catch (const EvalError&) {
        return;
      }
    }
    if (direct) {
      Value v;
      try {
        v = eval(*defs[d], env, ctx);
      } catch (const EvalError&) {
        return;
      }
      if (in_domain(v, decl.type)) try_value(std::move(v));
      return;
    }
    for (const auto& v : domains[d]) {
      try_value(v);
      if (verdict) return;
    }
  }
};

void validate(const ProverConfig& cfg) {
  if (cfg.int_bound < 0 || cfg.max_seq_len < 0 || cfg.seq_elem_bound < 0) {
    throw std::invalid_argument("prover bounds must be non-negative");
  }
}

EvalContext make_ctx(const Obligation& ob, const ProverConfig& cfg, ClassSchemas& schemas) {
  for (const auto& [cls, fields] : ob.classes) {
    auto& names = schemas[cls];
    for (const auto& f : fields) names.push_back(f.name);
  }
  EvalContext ctx;
  ctx.schemas = &schemas;
  ctx.bounds = cfg.bounds();
  return ctx;
}

}  // namespace

ProofResult check_implication(const Obligation& ob, const ProverConfig& cfg) {
  validate(cfg);
  Search s{ob, cfg.bounds(), {}, {}, {}, {}, {}, {}, {}, {}, std::nullopt};
  s.ctx = make_ctx(ob, cfg, s.schemas);
  for (const auto& [cls, fields] : ob.classes) {
    auto& types = s.field_types[cls];
    for (const auto& f : fields) types.push_back(f.type);
  }

  std::map<std::string, std::size_t, std::less<>> index;
  for (std::size_t k = 0; k < ob.vars.size(); ++k) index[ob.vars[k].name] = k + 1;
  NameSet all = free_vars(ob.hypothesis);
  for (const auto& v : free_vars(ob.conclusion)) all.insert(v);
  for (const auto& v : all) {
    if (!index.count(v)) return ProofResult::unknown("variable '" + v + "' has no declared sort");
  }

  std::vector<Predicate> conjuncts;
  flatten(ob.hypothesis, conjuncts);
  s.checks.assign(ob.vars.size() + 1, {});
  s.defs.assign(ob.vars.size(), std::nullopt);
  s.guards.assign(ob.vars.size(), std::nullopt);
  for (const auto& c : conjuncts) {
    std::size_t level = 0;
    for (const auto& v : free_vars(c)) level = std::max(level, index[v]);
    s.checks[level].push_back(c);
    if (level == 0) continue;
    const std::size_t k = level - 1;
    if (s.defs[k] && !s.guards[k]) continue;
    const auto& name = ob.vars[k].name;
    const auto* im = c.as<pred::Implies>();
    if (im && (s.defs[k] || free_vars(im->lhs).count(name))) continue;
    const auto* a = (im ? im->rhs : c).as<pred::Atom>();
    const auto* eq = a ? a->expr.as<expr::Binary>() : nullptr;
    if (!eq || eq->op != BinOp::Eq) continue;
    for (const auto& [lhs, rhs] : {std::pair{eq->lhs, eq->rhs}, std::pair{eq->rhs, eq->lhs}}) {
      const auto* v = lhs.as<expr::Var>();
      if (v && v->name == name && !free_vars(rhs).count(name)) {
        s.defs[k] = rhs;
        s.guards[k] = im ? std::optional<Predicate>(im->lhs) : std::nullopt;
        break;
      }
    }
  }
  for (const auto& d : ob.vars) s.domains.push_back(enumerate_values(d.type, s.bounds, s.field_types));

  if (!s.all_true(s.checks[0])) return ProofResult::valid();
  s.dfs(0);
  return s.verdict ? *s.verdict : ProofResult::valid();
}

bool holds_at(const Obligation& ob, const Assignment& at, const ProverConfig& cfg) {
  ClassSchemas schemas;
  const EvalContext ctx = make_ctx(ob, cfg, schemas);
  Env env;
  for (const auto& [n, v] : at) env.push(n, v);
  return !holds(ob.hypothesis, env, ctx) || holds(ob.conclusion, env, ctx);
}

}  // namespace cbc
