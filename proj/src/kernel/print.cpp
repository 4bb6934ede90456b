#include "cbc/kernel/print.hpp"

#include <sstream>

#include "cbc/kernel/syntax.hpp"

namespace cbc {

namespace {

int precedence(BinOp op) {
  switch (op) {
    case BinOp::Or: return 1;
    case BinOp::And: return 2;
    case BinOp::Eq:
    case BinOp::Ne: return 3;
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge: return 4;
    case BinOp::Add:
    case BinOp::Sub: return 5;
    case BinOp::Mul:
    case BinOp::Div: return 6;
  }
  return 0;
}

constexpr int kUnary = 7;
constexpr int kAtomic = 9;

int expr_prec(const Expr& e) {
  if (const auto* b = e.as<expr::Binary>()) return precedence(b->op);
  if (e.is<expr::Not>()) return kUnary;
  if (const auto* i = e.as<expr::IntLit>(); i && i->value < 0) return kUnary;
  if (e.is<expr::Ite>()) return 0;
  return kAtomic;
}

std::string join(const std::vector<Expr>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += print(xs[i]);
  }
  return out;
}

std::string wrap(const Expr& e, int min_prec) {
  std::string s = print(e);
  return expr_prec(e) < min_prec ? "(" + s + ")" : s;
}

// -1 quantifier (extends right), 0 implication, 1 or, 2 and, 3 atomic
int pred_prec(const Predicate& p) {
  if (p.is<pred::Implies>()) return 0;
  if (p.is<pred::Or>()) return 1;
  if (p.is<pred::And>()) return 2;
  if (p.is<pred::Forall>() || p.is<pred::Exists>()) return -1;
  if (const auto* a = p.as<pred::Atom>()) {
    const int ep = expr_prec(a->expr);
    if (ep <= 2) return ep;
  }
  return 3;
}

std::string pwrap(const Predicate& p, int min_prec) {
  std::string s = print(p);
  return pred_prec(p) < min_prec ? "(" + s + ")" : s;
}

void indent_to(std::ostringstream& os, int n) {
  for (int i = 0; i < n; ++i) os << "  ";
}

void print_stmt(std::ostringstream& os, const Statement& s, int ind);

void print_body(std::ostringstream& os, const Statement& s, int ind) {
  os << "{\n";
  if (!s.is<stmt::Skip>()) {
    for (const auto& part : seq_parts(s)) print_stmt(os, part, ind + 1);
  }
  indent_to(os, ind);
  os << "}";
}

// Recovers an if/elseif/else chain from guarded-command guards; returns
// false when the guards do not have that shape.
bool as_chain(const stmt::Select& sel, std::vector<Expr>& conds, bool& has_else) {
  const auto n = sel.branches.size();
  if (n < 2) return false;
  std::vector<Expr> guards;
  for (const auto& b : sel.branches) guards.push_back(b.guard);
  // Candidate: every branch but the last supplies a condition.
  std::vector<Expr> cand;
  cand.push_back(guards[0]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    // guard i = !c0 && ... && !c(i-1) && ci
    const auto* b = guards[i].as<expr::Binary>();
    if (!b || b->op != BinOp::And) return false;
    cand.push_back(b->rhs);
  }
  if (chain_guards(cand, true) == guards) {
    conds = cand;
    has_else = true;
    return true;
  }
  return false;
}

void print_stmt(std::ostringstream& os, const Statement& s, int ind) {
  indent_to(os, ind);
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, stmt::Skip>) {
          os << "skip;";
        } else if constexpr (std::is_same_v<T, stmt::Assign>) {
          if (n.target == "result") {
            os << "return " << print(n.value) << ";";
          } else {
            os << n.target << " := " << print(n.value) << ";";
          }
        } else if constexpr (std::is_same_v<T, stmt::Seq>) {
          // Only reached for a Seq nested as a single part; print inline.
          os << "{\n";
          for (const auto& part : seq_parts(s)) print_stmt(os, part, ind + 1);
          indent_to(os, ind);
          os << "}";
        } else if constexpr (std::is_same_v<T, stmt::Select>) {
          std::vector<Expr> conds;
          bool has_else = false;
          if (as_chain(n, conds, has_else)) {
            for (std::size_t i = 0; i < conds.size(); ++i) {
              os << (i == 0 ? "if (" : " elseif (") << print(conds[i]) << ") ";
              print_body(os, n.branches[i].body, ind);
            }
            const auto& last = n.branches.back().body;
            if (!last.template is<stmt::Skip>()) {
              os << " else ";
              print_body(os, last, ind);
            }
          } else {
            os << "if";
            for (const auto& b : n.branches) {
              os << " [] " << print(b.guard) << " -> ";
              print_body(os, b.body, ind);
            }
            os << " fi";
          }
        } else if constexpr (std::is_same_v<T, stmt::Repeat>) {
          os << "while (" << print(n.guard) << ")\n";
          indent_to(os, ind + 2);
          os << "invariant " << print(n.invariant) << "\n";
          indent_to(os, ind + 2);
          os << "decreases " << print(n.variant) << "\n";
          indent_to(os, ind);
          print_body(os, n.body, ind);
        } else if constexpr (std::is_same_v<T, stmt::MethodCall>) {
          os << n.target << " := " << n.method << "(" << join(n.args) << ");";
        } else if constexpr (std::is_same_v<T, stmt::Abstract>) {
          os << "⟨abstract " << n.id << "⟩";
        } else if constexpr (std::is_same_v<T, stmt::BlockRef>) {
          os << "block " << n.name << " requires " << print(n.pre) << " ensures "
             << print(n.post) << ";";
        } else if constexpr (std::is_same_v<T, stmt::LocalDecl>) {
          os << to_string(n.type) << " " << n.name << " := " << print(n.init) << ";";
        }
      },
      s.node().v);
  os << "\n";
}

}  // namespace

std::vector<Expr> chain_guards(const std::vector<Expr>& conds, bool has_else) {
  std::vector<Expr> out;
  std::vector<Expr> negs;
  auto with_negs = [&](std::optional<Expr> last) {
    std::optional<Expr> acc;
    for (const auto& n : negs) acc = acc ? binary(BinOp::And, *acc, n) : n;
    if (last) acc = acc ? binary(BinOp::And, *acc, *last) : *last;
    return *acc;
  };
  for (const auto& c : conds) {
    out.push_back(with_negs(c));
    negs.push_back(not_(c));
  }
  if (has_else || conds.size() == 1) out.push_back(with_negs(std::nullopt));
  return out;
}

std::string print(const Expr& e) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, expr::IntLit>) {
          return std::to_string(n.value);
        } else if constexpr (std::is_same_v<T, expr::BoolLit>) {
          return n.value ? "true" : "false";
        } else if constexpr (std::is_same_v<T, expr::Var>) {
          return n.name;
        } else if constexpr (std::is_same_v<T, expr::Old>) {
          return "old(" + n.name + ")";
        } else if constexpr (std::is_same_v<T, expr::Binary>) {
          const int p = precedence(n.op);
          // Comparisons are non-associative; arithmetic is left-associative.
          const bool rel = p == 3 || p == 4;
          return wrap(n.lhs, rel ? p + 1 : p) + " " + to_string(n.op) + " " +
                 wrap(n.rhs, p + 1);
        } else if constexpr (std::is_same_v<T, expr::Not>) {
          return "!" + wrap(n.inner, kUnary);
        } else if constexpr (std::is_same_v<T, expr::SeqLit>) {
          return "[" + join(n.elems) + "]";
        } else if constexpr (std::is_same_v<T, expr::SeqOp>) {
          std::string arg = n.arg ? print(*n.arg) : "";
          return wrap(n.receiver, kAtomic) + "." + to_string(n.op) + "(" + arg + ")";
        } else if constexpr (std::is_same_v<T, expr::Call>) {
          return wrap(n.receiver, kAtomic) + "." + n.method + "(" + join(n.args) + ")";
        } else if constexpr (std::is_same_v<T, expr::New>) {
          return "new " + n.cls + "(" + join(n.args) + ")";
        } else if constexpr (std::is_same_v<T, expr::Result>) {
          return "result";
        } else if constexpr (std::is_same_v<T, expr::Ite>) {
          std::string out = "if (" + print(n.cond) + ") {" + print(n.then_branch) + "}";
          Expr rest = n.else_branch;
          while (const auto* inner = rest.template as<expr::Ite>()) {
            out += " elseif (" + print(inner->cond) + ") {" + print(inner->then_branch) + "}";
            rest = inner->else_branch;
          }
          return out + " else {" + print(rest) + "}";
        }
      },
      e.node().v);
}

std::string print(const BoundedDomain& d) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, domain::IntRange>) {
          return "[" + print(n.lo) + ", " + print(n.hi) + "]";
        } else if constexpr (std::is_same_v<T, domain::SeqElems>) {
          return "elems(" + print(n.seq) + ")";
        } else if constexpr (std::is_same_v<T, domain::SeqIndices>) {
          return "indices(" + print(n.seq) + ")";
        } else {
          return to_string(n.type);
        }
      },
      d);
}

std::string print(const Predicate& p) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, pred::Atom>) {
          return print(n.expr);
        } else if constexpr (std::is_same_v<T, pred::And> || std::is_same_v<T, pred::Or>) {
          const int self = std::is_same_v<T, pred::And> ? 2 : 1;
          const char* sep = std::is_same_v<T, pred::And> ? " && " : " || ";
          std::string out;
          for (std::size_t i = 0; i < n.parts.size(); ++i) {
            if (i) out += sep;
            out += pwrap(n.parts[i], self + 1);
          }
          return out;
        } else if constexpr (std::is_same_v<T, pred::Not>) {
          if (const auto* a = n.inner.template as<pred::Atom>();
              a && expr_prec(a->expr) < kUnary) {
            return "!(" + print(n.inner) + ")";
          }
          return "!" + pwrap(n.inner, 3);
        } else if constexpr (std::is_same_v<T, pred::Implies>) {
          return pwrap(n.lhs, 1) + " ==> " + pwrap(n.rhs, 0);
        } else if constexpr (std::is_same_v<T, pred::Forall>) {
          return "forall " + n.var + " in " + print(n.dom) + ": " + print(n.body);
        } else if constexpr (std::is_same_v<T, pred::Exists>) {
          return "exists " + n.var + " in " + print(n.dom) + ": " + print(n.body);
        } else if constexpr (std::is_same_v<T, pred::True>) {
          return "true";
        } else {
          return "false";
        }
      },
      p.node().v);
}

std::string print(const Statement& s, int indent) {
  std::ostringstream os;
  for (const auto& part : seq_parts(s)) print_stmt(os, part, indent);
  return os.str();
}

}  // namespace cbc
