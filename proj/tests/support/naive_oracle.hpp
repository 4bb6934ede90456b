#pragma once

// A deliberately plain evaluator and exhaustive enumerator used to cross-check
// the prover. It only reads the syntax tree; evaluation is written from scratch.

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cbc/kernel/ast.hpp"

namespace cbc::oracle {

struct Undefined : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NV {
  char k = 'i';  // 'i' int, 'b' bool, 's' list
  long long i = 0;
  bool b = false;
  std::vector<long long> s;

  bool operator==(const NV& o) const {
    if (k != o.k) return false;
    if (k == 'i') return i == o.i;
    if (k == 'b') return b == o.b;
    return s == o.s;
  }
};

inline NV I(long long v) { NV n; n.k = 'i'; n.i = v; return n; }
inline NV B(bool v) { NV n; n.k = 'b'; n.b = v; return n; }
inline NV S(std::vector<long long> v) { NV n; n.k = 's'; n.s = std::move(v); return n; }

struct Limits {
  long long ints = 4;
  long long len = 3;
  long long elems = 2;
};

using Store = std::vector<std::pair<std::string, NV>>;

class Naive {
 public:
  explicit Naive(Limits lim) : lim_(lim) {}

  std::vector<NV> all_ints() const {
    std::vector<NV> out;
    for (long long v = -lim_.ints; v <= lim_.ints; ++v) out.push_back(I(v));
    return out;
  }

  std::vector<NV> all_lists() const {
    std::vector<NV> out{S({})};
    std::vector<std::vector<long long>> layer{{}};
    for (long long n = 1; n <= lim_.len; ++n) {
      std::vector<std::vector<long long>> next;
      for (const auto& prefix : layer) {
        for (long long v = -lim_.elems; v <= lim_.elems; ++v) {
          auto x = prefix;
          x.push_back(v);
          next.push_back(x);
        }
      }
      for (const auto& x : next) out.push_back(S(x));
      layer = next;
    }
    return out;
  }

  std::vector<NV> all_of(const Type& t) const {
    if (t.kind == Type::Kind::Int) return all_ints();
    if (t.kind == Type::Kind::Bool) return {B(false), B(true)};
    if (t.kind == Type::Kind::Seq) return all_lists();
    throw std::logic_error("oracle: unsupported sort");
  }

  NV ev(const Expr& e, Store& st) const {
    if (auto* n = e.as<expr::IntLit>()) return I(n->value);
    if (auto* n = e.as<expr::BoolLit>()) return B(n->value);
    if (auto* n = e.as<expr::Var>()) return get(st, n->name);
    if (auto* n = e.as<expr::Not>()) return B(!boolean(ev(n->inner, st)));
    if (auto* n = e.as<expr::Ite>()) {
      return boolean(ev(n->cond, st)) ? ev(n->then_branch, st) : ev(n->else_branch, st);
    }
    if (auto* n = e.as<expr::SeqLit>()) {
      std::vector<long long> xs;
      for (const auto& x : n->elems) xs.push_back(integer(ev(x, st)));
      return S(xs);
    }
    if (auto* n = e.as<expr::SeqOp>()) return seq_op(*n, st);
    if (auto* n = e.as<expr::Binary>()) return bin(*n, st);
    throw std::logic_error("oracle: unsupported expression");
  }

  bool sat(const Predicate& p, Store& st) const {
    if (p.is<pred::True>()) return true;
    if (p.is<pred::False>()) return false;
    if (auto* n = p.as<pred::Atom>()) return boolean(ev(n->expr, st));
    if (auto* n = p.as<pred::Not>()) return !sat(n->inner, st);
    if (auto* n = p.as<pred::And>()) {
      for (const auto& x : n->parts) {
        if (!sat(x, st)) return false;
      }
      return true;
    }
    if (auto* n = p.as<pred::Or>()) {
      for (const auto& x : n->parts) {
        if (sat(x, st)) return true;
      }
      return false;
    }
    if (auto* n = p.as<pred::Implies>()) {
      if (!sat(n->lhs, st)) return true;
      return sat(n->rhs, st);
    }
    if (auto* n = p.as<pred::Forall>()) return quant(true, n->var, n->dom, n->body, st);
    if (auto* n = p.as<pred::Exists>()) return quant(false, n->var, n->dom, n->body, st);
    throw std::logic_error("oracle: unsupported predicate");
  }

  struct Verdict {
    char kind = 'V';  // 'V' valid, 'I' invalid, 'U' undefined conclusion
    Store at;
  };

  // Visits every store of the product domain, first variable outermost.
  Verdict decide(const Predicate& h, const Predicate& c,
                 const std::vector<std::pair<std::string, Type>>& vars) const {
    std::vector<std::vector<NV>> doms;
    for (const auto& v : vars) doms.push_back(all_of(v.second));
    std::vector<std::size_t> idx(vars.size(), 0);
    for (const auto& d : doms) {
      if (d.empty()) return {};
    }
    while (true) {
      Store st;
      for (std::size_t k = 0; k < vars.size(); ++k) st.emplace_back(vars[k].first, doms[k][idx[k]]);
      bool hyp = false;
      try {
        hyp = sat(h, st);
      } catch (const Undefined&) {
        hyp = false;
      }
      if (hyp) {
        try {
          if (!sat(c, st)) return {'I', st};
        } catch (const Undefined&) {
          return {'U', st};
        }
      }
      std::size_t k = vars.size();
      while (k > 0) {
        --k;
        if (++idx[k] < doms[k].size()) break;
        idx[k] = 0;
        if (k == 0) return {};
      }
      if (vars.empty()) return {};
    }
  }

 private:
  static NV get(const Store& st, const std::string& name) {
    for (std::size_t k = st.size(); k > 0; --k) {
      if (st[k - 1].first == name) return st[k - 1].second;
    }
    throw std::logic_error("oracle: unbound " + name);
  }

  static long long integer(const NV& v) {
    if (v.k != 'i') throw Undefined("not an int");
    return v.i;
  }
  static bool boolean(const NV& v) {
    if (v.k != 'b') throw Undefined("not a bool");
    return v.b;
  }
  static const std::vector<long long>& list(const NV& v) {
    if (v.k != 's') throw Undefined("not a list");
    return v.s;
  }

  NV seq_op(const expr::SeqOp& n, Store& st) const {
    const NV r = ev(n.receiver, st);
    const auto& s = list(r);
    const long long len = static_cast<long long>(s.size());
    if (n.op == SeqOpKind::Size) return I(len);
    if (n.op == SeqOpKind::Element) {
      if (len == 0) throw Undefined("element");
      return I(s[0]);
    }
    if (n.op == SeqOpKind::Tail) {
      if (len == 0) throw Undefined("tail");
      return S(std::vector<long long>(s.begin() + 1, s.end()));
    }
    const NV a = ev(*n.arg, st);
    if (n.op == SeqOpKind::Get) {
      const long long i = integer(a);
      if (i < 0 || i >= len) throw Undefined("get");
      return I(s[static_cast<std::size_t>(i)]);
    }
    if (a.k != 'i') return B(false);
    for (long long x : s) {
      if (x == a.i) return B(true);
    }
    return B(false);
  }

  NV bin(const expr::Binary& n, Store& st) const {
    if (n.op == BinOp::And) return B(boolean(ev(n.lhs, st)) ? boolean(ev(n.rhs, st)) : false);
    if (n.op == BinOp::Or) return B(boolean(ev(n.lhs, st)) ? true : boolean(ev(n.rhs, st)));
    const NV a = ev(n.lhs, st);
    const NV b = ev(n.rhs, st);
    if (n.op == BinOp::Eq || n.op == BinOp::Ne) {
      if (a.k != b.k) throw Undefined("mixed sorts");
      return B((a == b) == (n.op == BinOp::Eq));
    }
    const long long x = integer(a);
    const long long y = integer(b);
    long long out = 0;
    switch (n.op) {
      case BinOp::Add:
        if (__builtin_add_overflow(x, y, &out)) throw Undefined("overflow");
        return I(out);
      case BinOp::Sub:
        if (__builtin_sub_overflow(x, y, &out)) throw Undefined("overflow");
        return I(out);
      case BinOp::Mul:
        if (__builtin_mul_overflow(x, y, &out)) throw Undefined("overflow");
        return I(out);
      case BinOp::Div: {
        if (y == 0) throw Undefined("division by zero");
        if (x == std::numeric_limits<long long>::min() && y == -1) throw Undefined("overflow");
        // Smallest remainder that is non-negative.
        long long q = x / y;
        if (x % y < 0) q = y > 0 ? q - 1 : q + 1;
        return I(q);
      }
      case BinOp::Lt: return B(x < y);
      case BinOp::Le: return B(x <= y);
      case BinOp::Gt: return B(x > y);
      case BinOp::Ge: return B(x >= y);
      default: throw std::logic_error("oracle: operator");
    }
  }

  bool quant(bool all, const std::string& v, const BoundedDomain& d, const Predicate& body,
             Store& st) const {
    std::vector<NV> vals;
    if (auto* r = std::get_if<domain::IntRange>(&d)) {
      const long long lo = integer(ev(r->lo, st));
      const long long hi = integer(ev(r->hi, st));
      if (hi >= lo && hi - lo > 100000) throw Undefined("range");
      for (long long k = lo; k <= hi; ++k) vals.push_back(I(k));
    } else if (auto* e = std::get_if<domain::SeqElems>(&d)) {
      const NV seq = ev(e->seq, st);
      for (long long x : list(seq)) vals.push_back(I(x));
    } else if (auto* ix = std::get_if<domain::SeqIndices>(&d)) {
      const auto n = list(ev(ix->seq, st)).size();
      for (std::size_t k = 0; k < n; ++k) vals.push_back(I(static_cast<long long>(k)));
    } else {
      vals = all_of(std::get<domain::AllOf>(d).type);
    }
    for (const auto& x : vals) {
      st.emplace_back(v, x);
      bool r;
      try {
        r = sat(body, st);
      } catch (...) {
        st.pop_back();
        throw;
      }
      st.pop_back();
      if (all && !r) return false;
      if (!all && r) return true;
    }
    return all;
  }

  Limits lim_;
};

}  // namespace cbc::oracle
