#include <random>

#include "cbc/kernel/eval.hpp"
#include "cbc/kernel/parser.hpp"
#include "cbc/kernel/print.hpp"
#include "cbc/prover/obligation.hpp"
#include "cbc/prover/smt.hpp"
#include "cbc/prover/wp.hpp"
#include "doctest.h"
#include "naive_oracle.hpp"
#include "random_terms.hpp"

using namespace cbc;

namespace {

Obligation ob(const std::string& h, const std::string& c, std::vector<VarDecl> vars) {
  return {"t", parse_predicate(h), parse_predicate(c), "test", std::move(vars), {}};
}

const VarDecl kX{"x", Type::integer()};
const VarDecl kY{"y", Type::integer()};
const VarDecl kList{"list", Type::sequence()};
const VarDecl kI{"i", Type::integer()};
const VarDecl kJ{"j", Type::integer()};

WpContext ctx_for(std::vector<VarDecl> vars) {
  WpContext c;
  for (const auto& v : vars) c.types[v.name] = v.type;
  return c;
}

}  // namespace

TEST_CASE("implication examples") {
  CHECK(check_implication(ob("x == 0", "x >= 0", {kX})).is_valid());
  const auto r = check_implication(ob("true", "x > 0", {kX}));
  CHECK(r.kind == ProofResult::Kind::Invalid);
  CHECK(format_assignment(r.counterexample) == "{x: -4}");
  CHECK(check_implication(ob("list.size() > 0 && i == list.get(0) && j == 1", "list.size() > 0",
                             {kList, kI, kJ}))
            .is_valid());
}

TEST_CASE("first counterexample follows enumeration order") {
  const auto r = check_implication(ob("x < y", "x + 1 < y", {kX, kY}));
  CHECK(format_assignment(r.counterexample) == "{x: -4, y: -3}");
  const auto s = check_implication(ob("list.size() > 1", "list.get(0) <= list.get(1)", {kList}));
  CHECK(format_assignment(s.counterexample) == "{list: [-1, -2]}");
}

TEST_CASE("partiality policy") {
  // Undefined under a false hypothesis is fine.
  CHECK(check_implication(ob("list.size() > 0", "list.element() == list.get(0)", {kList}))
            .is_valid());
  CHECK(check_implication(ob("list.size() > 0 && list.tail().element() > 5", "false", {kList}))
            .is_valid());
  // Undefined under a true hypothesis is reported.
  const auto r = check_implication(ob("true", "list.element() >= -2", {kList}));
  CHECK(r.kind == ProofResult::Kind::Unknown);
  CHECK(format_assignment(r.counterexample) == "{list: []}");
}

TEST_CASE("undeclared variables and bad bounds") {
  CHECK(check_implication(ob("true", "z > 0", {kX})).kind == ProofResult::Kind::Unknown);
  ProverConfig bad;
  bad.int_bound = -1;
  CHECK_THROWS_AS(check_implication(ob("true", "x > 0", {kX}), bad), std::invalid_argument);
}

TEST_CASE("bounds change the domain") {
  ProverConfig cfg;
  cfg.int_bound = 2;
  const auto r = check_implication(ob("true", "x > 0", {kX}), cfg);
  CHECK(format_assignment(r.counterexample) == "{x: -2}");
  CHECK(check_implication(ob("true", "x < 5", {kX})).is_valid());
  cfg.int_bound = 5;
  CHECK(format_assignment(check_implication(ob("true", "x < 5", {kX}), cfg).counterexample) ==
        "{x: 5}");
}

TEST_CASE("definitional hypotheses agree with plain enumeration") {
  // The same obligation with the definition hidden behind a disjunction.
  const auto a = check_implication(ob("x == y * 2 - 1", "x < 3", {kY, kX}));
  const auto b = check_implication(ob("x == y * 2 - 1 || false", "x < 3", {kY, kX}));
  CHECK(a == b);
  CHECK(format_assignment(a.counterexample) == "{y: 2, x: 3}");
}

TEST_CASE("determinism and genuine counterexamples on random obligations") {
  testing::TermGen gen(7);
  const std::vector<VarDecl> vars{{"x", Type::integer()},
                                  {"y", Type::integer()},
                                  {"b", Type::boolean()},
                                  {"l", Type::sequence()}};
  int invalid = 0;
  for (int k = 0; k < 200; ++k) {
    Obligation o{"r" + std::to_string(k), gen.predicate(2), gen.predicate(2), "random", vars, {}};
    const auto r1 = check_implication(o);
    const auto r2 = check_implication(o);
    CHECK(r1 == r2);
    if (r1.kind == ProofResult::Kind::Invalid) {
      ++invalid;
      CHECK(r1.counterexample.size() == vars.size());
      CHECK_FALSE(holds_at(o, r1.counterexample));
    }
  }
  CHECK(invalid > 10);
}

TEST_CASE("wp of skip and assignment") {
  auto c = ctx_for({kX});
  const auto q = parse_predicate("x == 1");
  CHECK(print(wp(parse_statement("x := x + 1;"), q, c).pre) == "x + 1 == 1");
  CHECK(wp(skip(), q, c).pre == q);
  CHECK_THROWS_AS(wp(parse_statement("z := 1;"), q, c), WpError);
  CHECK_THROWS_AS(wp(abstract_stmt("A0"), q, c), WpError);
}

TEST_CASE("wp of selection") {
  auto c = ctx_for({kX, kY});
  const auto r = wp(parse_statement("if (x > 0) { y := x; } else { y := 0 - x; }"),
                    parse_predicate("y >= 0"), c);
  CHECK(r.sides.empty());
  CHECK(check_implication({"s", p_true(), r.pre, "", {kX, kY}, {}}).is_valid());
  const auto g = wp(parse_statement("if [] x > 0 -> { skip; } fi"), parse_predicate("true"), c);
  const auto cover = check_implication({"g", p_true(), g.pre, "", {kX}, {}});
  CHECK(format_assignment(cover.counterexample) == "{x: -4}");
}

TEST_CASE("wp of the larger-element block is valid under its precondition") {
  auto c = ctx_for({kList, kI, kJ});
  const auto pre = parse_predicate(
      "list.contains(i) && j > 0 && j < list.size() && "
      "(forall q in [0, j - 1]: i >= list.get(q))");
  const auto post = parse_predicate(
      "list.contains(i) && j > 0 && j < list.size() && "
      "(forall q in [0, j]: i >= list.get(q))");
  const auto body = parse_statement("if (list.get(j) > i) { i := list.get(j); }");
  const auto r = wp(body, post, c);
  const auto res = check_implication({"B2", pre, r.pre, "", {kList, kI, kJ}, {}});
  CHECK(res.is_valid());
  // Dropping the update breaks it.
  const auto bad = wp(parse_statement("skip;"), post, c);
  CHECK(check_implication({"B2'", pre, bad.pre, "", {kList, kI, kJ}, {}}).kind ==
        ProofResult::Kind::Invalid);
}

TEST_CASE("wp of a loop emits three side obligations") {
  auto c = ctx_for({kList, kI, kJ});
  const auto loop = parse_statement(
      "while (j < list.size()) "
      "invariant list.contains(i) && j > 0 && j <= list.size() && "
      "(forall q in [0, j - 1]: i >= list.get(q)) "
      "decreases list.size() - j "
      "{ if (list.get(j) > i) { i := list.get(j); } j := j + 1; }");
  const auto post = parse_predicate("list.contains(i) && (forall q in [0, list.size() - 1]: i >= list.get(q))");
  const auto r = wp(loop, post, c);
  REQUIRE(r.sides.size() == 3);
  CHECK(r.sides[0].label == "loop exit");
  CHECK(r.sides[1].label == "loop preservation");
  CHECK(r.sides[2].label == "loop variant");
  REQUIRE(r.sides[2].extra.size() == 1);
  for (const auto& s : r.sides) {
    auto vars = std::vector<VarDecl>{kList, kI, kJ};
    vars.insert(vars.end(), s.extra.begin(), s.extra.end());
    CHECK_MESSAGE(check_implication({s.label, s.hypothesis, s.conclusion, "", vars, {}}).is_valid(),
                  s.label);
  }
}

TEST_CASE("a negative variant is rejected") {
  auto c = ctx_for({kX});
  const auto loop = parse_statement("while (x < 3) invariant true decreases -1 { x := x + 1; }");
  const auto r = wp(loop, parse_predicate("true"), c);
  const auto& v = r.sides[2];
  auto vars = std::vector<VarDecl>{kX};
  vars.insert(vars.end(), v.extra.begin(), v.extra.end());
  CHECK(check_implication({"v", v.hypothesis, v.conclusion, "", vars, {}}).kind ==
        ProofResult::Kind::Invalid);
}

TEST_CASE("wp of a method call uses the callee contract") {
  MethodTable table;
  table["inc"] = {"inc", {{"a", Type::integer()}}, Type::integer(),
                  make_contract(parse_predicate("a >= 0"), parse_predicate("result == old(a) + 1"))};
  auto c = ctx_for({kX, kY});
  c.methods = &table;
  const auto r = wp(parse_statement("y := inc(x);"), parse_predicate("y > x"), c);
  CHECK(check_implication({"c", parse_predicate("x >= 0"), r.pre, "", {kX, kY}, {}}).is_valid());
  const auto weak = check_implication({"c", p_true(), r.pre, "", {kX, kY}, {}});
  CHECK(format_assignment(weak.counterexample) == "{x: -4, y: -4}");
  CHECK_THROWS_AS(wp(parse_statement("y := dec(x);"), p_true(), c), WpError);
  CHECK_THROWS_AS(wp(parse_statement("x := inc(x);"), p_true(), c), WpError);
}

namespace {

Expr safe_int(std::mt19937& rng, int depth) {
  const int k = std::uniform_int_distribution<int>(0, depth <= 0 ? 1 : 4)(rng);
  const char* names[] = {"x", "y"};
  switch (k) {
    case 0: return int_lit(std::uniform_int_distribution<int>(-2, 2)(rng));
    case 1: return var(names[rng() % 2]);
    case 2: return binary(BinOp::Add, safe_int(rng, depth - 1), safe_int(rng, depth - 1));
    case 3: return binary(BinOp::Sub, safe_int(rng, depth - 1), safe_int(rng, depth - 1));
    default: return binary(BinOp::Mul, safe_int(rng, depth - 1), safe_int(rng, depth - 1));
  }
}

Statement safe_stmt(std::mt19937& rng, int depth) {
  const int k = std::uniform_int_distribution<int>(0, depth <= 0 ? 1 : 3)(rng);
  const char* names[] = {"x", "y"};
  switch (k) {
    case 0: return skip();
    case 1: return assign(names[rng() % 2], safe_int(rng, 1));
    case 2: return seq(safe_stmt(rng, depth - 1), safe_stmt(rng, depth - 1));
    default: {
      const Expr g = binary(BinOp::Lt, safe_int(rng, 1), safe_int(rng, 1));
      std::vector<stmt::Branch> bs{{g, safe_stmt(rng, depth - 1)}};
      if (rng() % 2) bs.push_back({not_(g), safe_stmt(rng, depth - 1)});
      return select(bs);
    }
  }
}

}  // namespace

TEST_CASE("wp is sound on bounded stores") {
  std::mt19937 rng(11);
  testing::TermGen gen(3);
  const Bounds b{3, 2, 1};
  const auto ints = enumerate_values(Type::integer(), b);
  const auto lists = enumerate_values(Type::sequence(), b);
  int established = 0;
  for (int k = 0; k < 60; ++k) {
    const Statement s = safe_stmt(rng, 3);
    const Predicate q = gen.predicate(2);
    auto c = ctx_for({{"x", Type::integer()}, {"y", Type::integer()}, {"b", Type::boolean()},
                      {"l", Type::sequence()}});
    const Predicate pre = wp(s, q, c).pre;
    for (const auto& x : ints) {
      for (const auto& y : ints) {
        for (bool bv : {false, true}) {
          for (const auto& l : lists) {
            Env env;
            env.push("x", x);
            env.push("y", y);
            env.push("b", Value::boolean(bv));
            env.push("l", l);
            EvalContext ctx;
            ctx.bounds = b;
            bool before = false;
            try {
              before = holds(pre, env, ctx);
            } catch (const EvalError&) {
              continue;
            }
            if (!before) continue;
            ++established;
            long fuel = 100;
            REQUIRE_NOTHROW(exec(s, env, ctx, {}, fuel));
            CHECK_MESSAGE(holds(q, env, ctx), print(s), " / ", print(q));
          }
        }
      }
    }
  }
  CHECK(established > 1000);
}

TEST_CASE("smt export is deterministic and well formed") {
  const auto o = ob("x == 0", "x >= 0", {kX});
  const auto a = emit_smt(o);
  CHECK(a == emit_smt(o));
  CHECK(a.find("(declare-const v_x Int)") != std::string::npos);
  CHECK(a.find("(assert (and (= v_x 0) (not (>= v_x 0))))") != std::string::npos);
  CHECK(a.find("(check-sat)") != std::string::npos);
  SmtOptions bounded;
  bounded.bounded = true;
  const auto b = emit_smt(o, bounded);
  CHECK(b.find("(assert (and (<= (- 4) v_x) (<= v_x 4)))") != std::string::npos);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("smt export of lists and quantifiers") {
  const auto o = ob("list.size() > 0 && (forall q in elems(list): q <= i)",
                    "list.contains(i) || list.tail() == [1, 2]", {kList, kI});
  const auto s = emit_smt(o);
  CHECK(s.find("(declare-const v_list IntList)") != std::string::npos);
  CHECK(s.find("(let ((v_q (at v_list k!") != std::string::npos);
  CHECK(s.find("(= (len (tl v_list)) 2)") != std::string::npos);
  // Primed names are quoted.
  const auto p = emit_smt(ob("x' == x", "x' >= x", {kX, {"x'", Type::integer()}}));
  CHECK(p.find("|v_x'|") != std::string::npos);
}

TEST_CASE("prover agrees with the naive oracle") {
  for (bool total : {false, true}) {
    testing::TermGen gen(total ? 101 : 202, total);
    std::vector<std::pair<std::string, Type>> decls = gen.vars();
    std::vector<VarDecl> vars;
    for (const auto& [n, t] : decls) vars.push_back({n, t});
    const oracle::Naive naive({4, 3, 2});
    for (int k = 0; k < 150; ++k) {
      Predicate h = gen.predicate(2);
      Predicate c = gen.predicate(2);
      const auto r = check_implication({"o", h, c, "", vars, {}});
      const auto v = naive.decide(h, c, decls);
      const char kind = r.kind == ProofResult::Kind::Valid     ? 'V'
                        : r.kind == ProofResult::Kind::Invalid ? 'I'
                                                               : 'U';
      CHECK_MESSAGE(kind == v.kind, print(h), " => ", print(c));
      if (kind == v.kind && kind != 'V') {
        REQUIRE(r.counterexample.size() == v.at.size());
        for (std::size_t j = 0; j < v.at.size(); ++j) {
          const Value& a = r.counterexample[j].second;
          const oracle::NV& b = v.at[j].second;
          const bool same = (b.k == 'i' && a.kind == Type::Kind::Int && a.i == b.i) ||
                            (b.k == 'b' && a.kind == Type::Kind::Bool && a.b == b.b) ||
                            (b.k == 's' && a.kind == Type::Kind::Seq &&
                             std::vector<long long>(a.seq.begin(), a.seq.end()) == b.s);
          CHECK(same);
        }
      }
    }
  }
}
