#include "cbc/prover/smt.hpp"

#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cbc {

namespace {

std::string sym(const std::string& name) {
  std::string s = "v_" + name;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return "|" + s + "|";
  }
  return s;
}

std::string num(std::int64_t v) {
  return v < 0 ? "(- " + std::to_string(-v) + ")" : std::to_string(v);
}

std::string sort_name(const Type& t) {
  switch (t.kind) {
    case Type::Kind::Int: return "Int";
    case Type::Kind::Bool: return "Bool";
    case Type::Kind::Seq: return "IntList";
    default: return "Object";
  }
}

// A list either as an SMT term of sort IntList or as literal elements.
struct SeqTerm {
  bool literal = false;
  std::string term;
  std::vector<std::string> elems;
};

class Emitter {
 public:
  Emitter(const Obligation& ob, const SmtOptions& opt) : ob_(ob), opt_(opt) {
    for (const auto& v : ob.vars) scope_.emplace_back(v.name, v.type);
  }

  std::string pred(const Predicate& p) {
    return std::visit(
        [&](const auto& n) -> std::string {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, pred::Atom>) {
            return expr(n.expr);
          } else if constexpr (std::is_same_v<T, pred::And> || std::is_same_v<T, pred::Or>) {
            std::string out = std::is_same_v<T, pred::And> ? "(and" : "(or";
            for (const auto& x : n.parts) out += " " + pred(x);
            return out + ")";
          } else if constexpr (std::is_same_v<T, pred::Not>) {
            return "(not " + pred(n.inner) + ")";
          } else if constexpr (std::is_same_v<T, pred::Implies>) {
            return "(=> " + pred(n.lhs) + " " + pred(n.rhs) + ")";
          } else if constexpr (std::is_same_v<T, pred::Forall>) {
            return quant(true, n.var, n.dom, n.body);
          } else if constexpr (std::is_same_v<T, pred::Exists>) {
            return quant(false, n.var, n.dom, n.body);
          } else if constexpr (std::is_same_v<T, pred::True>) {
            return "true";
          } else {
            return "false";
          }
        },
        p.node().v);
  }

  std::string seq_bounds(const std::string& s) {
    const auto& b = opt_.bounds;
    const std::string k = fresh_index();
    return "(and (<= (len " + s + ") " + num(b.max_seq_len) + ") (forall ((" + k +
           " Int)) (=> (and (<= 0 " + k + ") (< " + k + " (len " + s + "))) (and (<= " +
           num(-b.seq_elem_bound) + " (at " + s + " " + k + ")) (<= (at " + s + " " + k + ") " +
           num(b.seq_elem_bound) + ")))))";
  }

  std::string var_bounds(const VarDecl& v) {
    const auto& b = opt_.bounds;
    if (v.type.kind == Type::Kind::Int) {
      return "(and (<= " + num(-b.int_bound) + " " + sym(v.name) + ") (<= " + sym(v.name) + " " +
             num(b.int_bound) + "))";
    }
    if (v.type.kind == Type::Kind::Seq) return seq_bounds(sym(v.name));
    return "";
  }

  const std::set<std::string>& getters() const { return getter_decls_; }
  bool uses_objects() const { return uses_objects_; }

 private:
  std::string fresh_index() { return "k!" + std::to_string(next_index_++); }

  Type sort_of(const Expr& e) {
    return std::visit(
        [&](const auto& n) -> Type {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, expr::IntLit>) {
            return Type::integer();
          } else if constexpr (std::is_same_v<T, expr::BoolLit> || std::is_same_v<T, expr::Not>) {
            return Type::boolean();
          } else if constexpr (std::is_same_v<T, expr::Var> || std::is_same_v<T, expr::Old>) {
            return lookup(n.name);
          } else if constexpr (std::is_same_v<T, expr::Result>) {
            return lookup("result");
          } else if constexpr (std::is_same_v<T, expr::Binary>) {
            switch (n.op) {
              case BinOp::Add:
              case BinOp::Sub:
              case BinOp::Mul:
              case BinOp::Div: return Type::integer();
              default: return Type::boolean();
            }
          } else if constexpr (std::is_same_v<T, expr::SeqLit>) {
            return Type::sequence();
          } else if constexpr (std::is_same_v<T, expr::SeqOp>) {
            switch (n.op) {
              case SeqOpKind::Contains: return Type::boolean();
              case SeqOpKind::Tail: return Type::sequence();
              default: return Type::integer();
            }
          } else if constexpr (std::is_same_v<T, expr::Call>) {
            return getter_type(n.method);
          } else if constexpr (std::is_same_v<T, expr::New>) {
            return (n.cls == "Nil" || n.cls == "Cons") ? Type::sequence() : Type::object(n.cls);
          } else {
            return sort_of(n.then_branch);
          }
        },
        e.node().v);
  }

  Type lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->first == name) return it->second;
    }
    throw std::invalid_argument("no sort for variable '" + name + "'");
  }

  Type getter_type(const std::string& m) const {
    for (const auto& [cls, fields] : ob_.classes) {
      for (const auto& f : fields) {
        if (f.name == m) return f.type;
      }
    }
    throw std::invalid_argument("call to '" + m + "' has no SMT encoding");
  }

  SeqTerm seq(const Expr& e) {
    if (const auto* l = e.as<expr::SeqLit>()) {
      SeqTerm t{true, {}, {}};
      for (const auto& x : l->elems) t.elems.push_back(expr(x));
      return t;
    }
    if (const auto* nw = e.as<expr::New>()) {
      if (nw->cls == "Nil") return {true, {}, {}};
      if (nw->cls == "Cons" && nw->args.size() == 2) {
        SeqTerm tail = seq(nw->args[1]);
        if (tail.literal) {
          tail.elems.insert(tail.elems.begin(), expr(nw->args[0]));
          return tail;
        }
      }
      throw std::invalid_argument("list construction has no SMT encoding");
    }
    if (const auto* op = e.as<expr::SeqOp>(); op && op->op == SeqOpKind::Tail) {
      SeqTerm r = seq(op->receiver);
      if (r.literal) {
        if (!r.elems.empty()) r.elems.erase(r.elems.begin());
        return r;
      }
      return {false, "(tl " + r.term + ")", {}};
    }
    return {false, expr(e), {}};
  }

  static std::string len(const SeqTerm& t) {
    return t.literal ? std::to_string(t.elems.size()) : "(len " + t.term + ")";
  }

  static std::string at(const SeqTerm& t, const std::string& i) {
    if (!t.literal) return "(at " + t.term + " " + i + ")";
    std::string out = "0";
    for (std::size_t k = t.elems.size(); k-- > 0;) {
      out = "(ite (= " + i + " " + std::to_string(k) + ") " + t.elems[k] + " " + out + ")";
    }
    return out;
  }

  std::string seq_eq(const SeqTerm& a, const SeqTerm& b) {
    if (a.literal && b.literal) {
      if (a.elems.size() != b.elems.size()) return "false";
      std::string out = "(and true";
      for (std::size_t k = 0; k < a.elems.size(); ++k) {
        out += " (= " + a.elems[k] + " " + b.elems[k] + ")";
      }
      return out + ")";
    }
    const std::string k = fresh_index();
    return "(and (= " + len(a) + " " + len(b) + ") (forall ((" + k + " Int)) (=> (and (<= 0 " +
           k + ") (< " + k + " " + len(a) + ")) (= " + at(a, k) + " " + at(b, k) + "))))";
  }

  std::string contains(const SeqTerm& s, const std::string& x) {
    if (s.literal) {
      std::string out = "(or false";
      for (const auto& e : s.elems) out += " (= " + e + " " + x + ")";
      return out + ")";
    }
    const std::string k = fresh_index();
    return "(exists ((" + k + " Int)) (and (<= 0 " + k + ") (< " + k + " " + len(s) + ") (= " +
           at(s, k) + " " + x + ")))";
  }

  std::string expr(const Expr& e) {
    return std::visit(
        [&](const auto& n) -> std::string {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, expr::IntLit>) {
            return num(n.value);
          } else if constexpr (std::is_same_v<T, expr::BoolLit>) {
            return n.value ? "true" : "false";
          } else if constexpr (std::is_same_v<T, expr::Var> || std::is_same_v<T, expr::Old>) {
            return sym(n.name);
          } else if constexpr (std::is_same_v<T, expr::Result>) {
            return sym("result");
          } else if constexpr (std::is_same_v<T, expr::Binary>) {
            return binary_expr(n);
          } else if constexpr (std::is_same_v<T, expr::Not>) {
            return "(not " + expr(n.inner) + ")";
          } else if constexpr (std::is_same_v<T, expr::SeqOp>) {
            switch (n.op) {
              case SeqOpKind::Size: return len(seq(n.receiver));
              case SeqOpKind::Get: return at(seq(n.receiver), expr(*n.arg));
              case SeqOpKind::Element: return at(seq(n.receiver), "0");
              case SeqOpKind::Contains: return contains(seq(n.receiver), expr(*n.arg));
              case SeqOpKind::Tail: return seq(e).term;
            }
            return "";
          } else if constexpr (std::is_same_v<T, expr::Call>) {
            if (!n.args.empty()) throw std::invalid_argument("call has no SMT encoding");
            const Type t = getter_type(n.method);
            uses_objects_ = true;
            getter_decls_.insert("(declare-fun " + sym("get_" + n.method) + " (Object) " +
                                 sort_name(t) + ")");
            return "(" + sym("get_" + n.method) + " " + expr(n.receiver) + ")";
          } else if constexpr (std::is_same_v<T, expr::Ite>) {
            return "(ite " + expr(n.cond) + " " + expr(n.then_branch) + " " +
                   expr(n.else_branch) + ")";
          } else {
            // List literals and constructors only occur under list operations.
            throw std::invalid_argument("list value outside a list operation");
          }
        },
        e.node().v);
  }

  std::string binary_expr(const expr::Binary& n) {
    const char* op = nullptr;
    switch (n.op) {
      case BinOp::Add: op = "+"; break;
      case BinOp::Sub: op = "-"; break;
      case BinOp::Mul: op = "*"; break;
      case BinOp::Div: op = "div"; break;
      case BinOp::Lt: op = "<"; break;
      case BinOp::Le: op = "<="; break;
      case BinOp::Gt: op = ">"; break;
      case BinOp::Ge: op = ">="; break;
      case BinOp::And: op = "and"; break;
      case BinOp::Or: op = "or"; break;
      case BinOp::Eq:
      case BinOp::Ne: {
        std::string eq;
        if (sort_of(n.lhs).kind == Type::Kind::Seq) {
          eq = seq_eq(seq(n.lhs), seq(n.rhs));
        } else {
          eq = "(= " + expr(n.lhs) + " " + expr(n.rhs) + ")";
        }
        return n.op == BinOp::Eq ? eq : "(not " + eq + ")";
      }
    }
    return std::string("(") + op + " " + expr(n.lhs) + " " + expr(n.rhs) + ")";
  }

  std::string quant(bool universal, const std::string& v, const BoundedDomain& d,
                    const Predicate& body) {
    const std::string q = universal ? "forall" : "exists";
    const std::string join = universal ? "=>" : "and";
    auto range = [&](const std::string& lo, const std::string& hi, bool hi_exclusive) {
      scope_.emplace_back(v, Type::integer());
      const std::string b = pred(body);
      scope_.pop_back();
      return "(" + q + " ((" + sym(v) + " Int)) (" + join + " (and (<= " + lo + " " + sym(v) +
             ") (" + (hi_exclusive ? "<" : "<=") + " " + sym(v) + " " + hi + ")) " + b + "))";
    };
    if (const auto* r = std::get_if<domain::IntRange>(&d)) {
      return range(expr(r->lo), expr(r->hi), false);
    }
    if (const auto* ix = std::get_if<domain::SeqIndices>(&d)) {
      return range("0", len(seq(ix->seq)), true);
    }
    if (const auto* el = std::get_if<domain::SeqElems>(&d)) {
      const SeqTerm s = seq(el->seq);
      const std::string k = fresh_index();
      scope_.emplace_back(v, Type::integer());
      const std::string b = pred(body);
      scope_.pop_back();
      return "(" + q + " ((" + k + " Int)) (" + join + " (and (<= 0 " + k + ") (< " + k + " " +
             len(s) + ")) (let ((" + sym(v) + " " + at(s, k) + ")) " + b + ")))";
    }
    const Type t = std::get<domain::AllOf>(d).type;
    if (t.kind == Type::Kind::Int && opt_.bounded) {
      return range(num(-opt_.bounds.int_bound), num(opt_.bounds.int_bound), false);
    }
    scope_.emplace_back(v, t);
    const std::string b = pred(body);
    scope_.pop_back();
    if (t.kind == Type::Kind::Object) uses_objects_ = true;
    if (t.kind == Type::Kind::Seq && opt_.bounded) {
      return "(" + q + " ((" + sym(v) + " IntList)) (" + join + " " + seq_bounds(sym(v)) + " " + b +
             "))";
    }
    return "(" + q + " ((" + sym(v) + " " + sort_name(t) + ")) " + b + ")";
  }

  const Obligation& ob_;
  const SmtOptions& opt_;
  std::vector<std::pair<std::string, Type>> scope_;
  std::set<std::string> getter_decls_;
  bool uses_objects_ = false;
  int next_index_ = 0;
};

}  // namespace

std::string emit_smt(const Obligation& ob, const SmtOptions& opt) {
  Emitter em(ob, opt);
  const std::string h = em.pred(ob.hypothesis);
  const std::string c = em.pred(ob.conclusion);
  std::vector<std::string> bounds;
  if (opt.bounded) {
    for (const auto& v : ob.vars) {
      const std::string b = em.var_bounds(v);
      if (!b.empty()) bounds.push_back(b);
    }
  }
  bool objects = em.uses_objects();
  for (const auto& v : ob.vars) objects = objects || v.type.kind == Type::Kind::Object;

  std::ostringstream os;
  os << "; obligation " << ob.id << "\n";
  if (!ob.provenance.empty()) os << "; " << ob.provenance << "\n";
  os << "(set-logic ALL)\n"
     << "(declare-sort IntList 0)\n";
  if (objects) os << "(declare-sort Object 0)\n";
  os << "(declare-fun len (IntList) Int)\n"
     << "(declare-fun at (IntList Int) Int)\n"
     << "(declare-fun tl (IntList) IntList)\n"
     << "(assert (forall ((s IntList)) (>= (len s) 0)))\n"
     << "(assert (forall ((s IntList)) (=> (> (len s) 0) (= (len (tl s)) (- (len s) 1)))))\n"
     << "(assert (forall ((s IntList) (k Int)) (=> (and (<= 0 k) (< (+ k 1) (len s))) "
        "(= (at (tl s) k) (at s (+ k 1))))))\n";
  for (const auto& v : ob.vars) {
    os << "(declare-const " << sym(v.name) << " " << sort_name(v.type) << ")\n";
  }
  for (const auto& g : em.getters()) os << g << "\n";
  for (const auto& b : bounds) os << "(assert " << b << ")\n";
  os << "(assert (and " << h << " (not " << c << ")))\n"
     << "(check-sat)\n";
  return os.str();
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace cbc
