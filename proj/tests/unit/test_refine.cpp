#include "cbc/block/block.hpp"
#include "cbc/kernel/parser.hpp"
#include "cbc/kernel/print.hpp"
#include "cbc/refine/tree.hpp"
#include "doctest.h"

using namespace cbc;

namespace {

const VarDecl kX{"x", Type::integer()};
const VarDecl kY{"y", Type::integer()};

// A void unit whose integer variables are mutable state.
MethodUnit unit_over(const std::string& pre, const std::string& post,
                     std::vector<VarDecl> state = {kX}) {
  MethodUnit u = make_unit("m", {}, Type::unit(), {parse_predicate(pre), parse_predicate(post)});
  u.locals = std::move(state);
  return u;
}

const ReportItem& item(const TreeReport& r, const std::string& id) {
  for (const auto& i : r.items) {
    if (i.id == id) return i;
  }
  FAIL("no obligation " << id);
  throw std::logic_error("unreachable");
}

ProofResult verdict(const MethodUnit& u, const std::string& id) {
  return item(check_tree(u).second, id).result;
}

std::string cex(const ProofResult& r) { return format_assignment(r.counterexample); }

}  // namespace

TEST_CASE("skip rule") {
  CHECK(verdict(apply_skip(unit_over("x == 1", "x >= 1"), "A0"), "A0.skip").is_valid());
  const auto r = verdict(apply_skip(unit_over("true", "x == 0"), "A0"), "A0.skip");
  CHECK(r.kind == ProofResult::Kind::Invalid);
  CHECK(cex(r) == "{x: -4}");
  CHECK(verdict(apply_skip(unit_over("x > y || x == 2", "x > y || x == 2", {kX, kY}), "A0"),
                "A0.skip")
            .is_valid());
  const auto u = apply_skip(unit_over("true", "true"), "A0");
  CHECK_THROWS_AS(apply_skip(u, "A0"), RefineError);
  CHECK_THROWS_AS(apply_skip(u, "A7"), RefineError);
}

TEST_CASE("assignment rule") {
  auto u = apply_assignment(unit_over("x == 0", "x == 1"), "A0", "x", parse_expr("x + 1"));
  CHECK(print(u.root.obligations.front().ob.conclusion) == "x + 1 == 1");
  CHECK(verdict(u, "A0.assign").is_valid());
  CHECK(verdict(apply_assignment(unit_over("true", "x == 1"), "A0", "x", parse_expr("2")),
                "A0.assign")
            .kind == ProofResult::Kind::Invalid);
  CHECK_THROWS_AS(apply_assignment(unit_over("true", "true"), "A0", "z", parse_expr("1")),
                  RefineError);
  CHECK_THROWS_AS(apply_assignment(unit_over("true", "true"), "A0", "x", parse_expr("true")),
                  RefineError);

  MethodUnit m = make_unit("m", {{"list", Type::sequence()}}, Type::unit(),
                           {parse_predicate("list.size() > 0"), parse_predicate("true")});
  m = apply_composition(m, "A0", parse_predicate("i == list.get(0)"));
  m = apply_assignment(m, "A1", "i", parse_expr("list.get(0)"), Type::integer());
  m = apply_skip(m, "A2");
  CHECK(print(m.find("A1")->stmt) == "int i := list.get(0);\n");
  CHECK(verdict(m, "A1.assign").is_valid());
  CHECK_THROWS_AS(apply_assignment(m, "A0", "list", parse_expr("[]")), RefineError);
  auto n = make_unit("m", {{"list", Type::sequence()}}, Type::unit(),
                     {parse_predicate("true"), parse_predicate("true")});
  CHECK_THROWS_AS(apply_assignment(n, "A0", "list", parse_expr("[1]")), RefineError);
}

TEST_CASE("composition rule") {
  const auto u = apply_composition(unit_over("x == 0", "x == 2"), "A0", parse_predicate("x == 1"));
  REQUIRE(u.root.children.size() == 2);
  CHECK(u.root.children[0].id == "A1");
  CHECK(print(u.root.children[0].pre) == "x == 0");
  CHECK(print(u.root.children[0].post) == "x == 1");
  CHECK(print(u.root.children[1].pre) == "x == 1");
  CHECK(print(u.root.children[1].post) == "x == 2");
  CHECK(u.root.obligations.empty());
  // mid = post: the second half is a skip.
  auto v = apply_composition(unit_over("x == 0", "x == 1"), "A0", parse_predicate("x == 1"));
  v = apply_skip(apply_assignment(v, "A1", "x", parse_expr("x + 1")), "A2");
  CHECK(check_tree(v).second.root == Status::Proven);
  // mid = pre: the first half is a skip.
  auto w = apply_composition(unit_over("x == 0", "x == 1"), "A0", parse_predicate("x == 0"));
  w = apply_assignment(apply_skip(w, "A1"), "A2", "x", parse_expr("x + 1"));
  CHECK(check_tree(w).second.root == Status::Proven);
}

TEST_CASE("selection rule") {
  auto u = apply_selection(unit_over("true", "x >= 0"), "A0",
                           {parse_expr("x > 0"), parse_expr("x <= 0")});
  CHECK(verdict(u, "A0.coverage").is_valid());
  REQUIRE(u.root.children.size() == 2);
  CHECK(print(u.root.children[1].pre) == "x <= 0");
  const auto r = verdict(apply_selection(unit_over("true", "x >= 0"), "A0", {parse_expr("x > 0")}),
                         "A0.coverage");
  CHECK(r.kind == ProofResult::Kind::Invalid);
  CHECK(cex(r) == "{x: -4}");
  CHECK_THROWS_AS(apply_selection(unit_over("true", "true"), "A0", {}), RefineError);
  CHECK_THROWS_AS(apply_selection(unit_over("true", "true"), "A0", {parse_expr("x")}), RefineError);

  MethodUnit m = make_unit("m", {{"list", Type::sequence()}, {"j", Type::integer()}}, Type::unit(),
                           {parse_predicate("j >= 0 && j < list.size()"), parse_predicate("true")});
  m.locals.push_back({"i", Type::integer()});
  m = apply_selection(m, "A0", {parse_expr("list.get(j) > i"), parse_expr("!(list.get(j) > i)")});
  CHECK(verdict(m, "A0.coverage").is_valid());
}

TEST_CASE("repetition rule") {
  // Vacuous loop.
  auto u = apply_repetition(unit_over("x >= 0", "x >= 0"), "A0", parse_predicate("x >= 0"),
                            parse_expr("x"), parse_expr("false"));
  CHECK(check_tree(u).second.root == Status::Open);
  u = apply_skip(u, "A1");
  const auto [checked, rep] = check_tree(u);
  CHECK(rep.root == Status::Proven);
  for (const auto& id : {"A0.entry", "A0.exit", "A0.variant", "A1.skip"}) {
    CHECK_MESSAGE(item(rep, id).result.is_valid(), id);
  }
  // A negative variant cannot be bounded below.
  auto v = apply_repetition(unit_over("true", "x >= 0"), "A0", parse_predicate("true"),
                            parse_expr("-1"), parse_expr("x < 0"));
  v = apply_assignment(v, "A1", "x", parse_expr("x + 1"));
  const auto r = verdict(v, "A0.variant");
  CHECK(r.kind == ProofResult::Kind::Invalid);
  CHECK(check_tree(v).second.root == Status::Failed);
  CHECK_THROWS_AS(apply_repetition(unit_over("true", "true"), "A0", parse_predicate("true"),
                                   parse_expr("x > 0"), parse_expr("x < 0")),
                  RefineError);
}

TEST_CASE("repetition of the maxElement loop") {
  MethodUnit m = make_unit("m", {{"list", Type::sequence()}}, Type::unit(),
                           {parse_predicate("list.size() > 0 && i == list.get(0) && j == 1"),
                            parse_predicate("list.contains(i) && (forall q in indices(list): "
                                            "i >= list.get(q))")});
  m.locals = {{"i", Type::integer()}, {"j", Type::integer()}};
  m = apply_repetition(m, "A0",
                       parse_predicate("list.contains(i) && j > 0 && j <= list.size() && "
                                       "(forall q in [0, j - 1]: i >= list.get(q))"),
                       parse_expr("list.size() - j"), parse_expr("j < list.size()"));
  const auto rep = check_tree(m).second;
  CHECK(item(rep, "A0.entry").result.is_valid());
  CHECK(item(rep, "A0.exit").result.is_valid());
}

TEST_CASE("weaken and strengthen") {
  auto w = [](const char* pre, const char* pre2) {
    return verdict(apply_weaken_pre(unit_over(pre, "true"), "A0", parse_predicate(pre2)),
                   "A0.weaken");
  };
  CHECK(w("x == 1", "x >= 1").is_valid());
  CHECK(w("x >= 1", "x >= 1").is_valid());
  const auto r = w("x >= 1", "x == 1");
  CHECK(cex(r) == "{x: 2}");

  auto s = [](const char* post, const char* post2) {
    return verdict(apply_strengthen_post(unit_over("true", post), "A0", parse_predicate(post2)),
                   "A0.strengthen");
  };
  CHECK(s("x >= 0", "x == 0").is_valid());
  CHECK(s("x == 0", "x == 0").is_valid());
  CHECK(cex(s("x == 0", "x >= 0")) == "{x: 1}");

  const auto u = apply_strengthen_post(unit_over("x == 1", "x >= 0"), "A0", parse_predicate("x == 1"));
  CHECK(print(u.root.pre) == "x == 1");
  CHECK(print(u.root.post) == "x >= 0");
  CHECK(print(u.root.children[0].post) == "x == 1");
}

TEST_CASE("method call rule") {
  MethodSig inc{"inc", {{"p", Type::integer()}}, Type::integer(),
                {parse_predicate("p >= 0"), parse_predicate("result == old(p) + 1")}};
  auto build = [&](const char* pre) {
    MethodUnit u = make_unit("m", {{"x", Type::integer()}}, Type::unit(),
                             {parse_predicate(pre), parse_predicate("y == x + 1")});
    u.locals = {kY};
    u.callees["inc"] = inc;
    return apply_method_call(u, "A0", "inc", {parse_expr("x")}, "y");
  };
  const auto ok = check_tree(build("x >= 0")).second;
  CHECK(item(ok, "A0.call-pre").result.is_valid());
  CHECK(item(ok, "A0.call-post").result.is_valid());
  CHECK(ok.root == Status::Proven);
  const auto bad = check_tree(build("true")).second;
  const auto& r = item(bad, "A0.call-pre").result;
  REQUIRE(r.kind == ProofResult::Kind::Invalid);
  CHECK(r.counterexample.front().second.i < 0);
  Obligation at_minus_one{"w", parse_predicate("true"), parse_predicate("x >= 0"), "", {{"x", Type::integer()}}, {}};
  CHECK_FALSE(holds_at(at_minus_one, {{"x", Value::integer(-1)}}));

  MethodUnit u = make_unit("m", {{"x", Type::integer()}}, Type::unit(),
                           {parse_predicate("true"), parse_predicate("true")});
  u.locals = {kY};
  u.callees["inc"] = inc;
  CHECK_THROWS_AS(apply_method_call(u, "A0", "dec", {parse_expr("x")}, "y"), RefineError);
  CHECK_THROWS_AS(apply_method_call(u, "A0", "inc", {}, "y"), RefineError);
  CHECK_THROWS_AS(apply_method_call(u, "A0", "inc", {parse_expr("y")}, "y"), RefineError);
  CHECK_THROWS_AS(apply_method_call(u, "A0", "inc", {parse_expr("1")}, "x"), RefineError);
}

TEST_CASE("check tree statuses") {
  const auto open = check_tree(apply_composition(unit_over("true", "true"), "A0",
                                                 parse_predicate("true")));
  CHECK(open.second.root == Status::Open);
  CHECK(open.second.open == std::vector<std::string>{"A1", "A2"});

  auto f = apply_composition(unit_over("true", "x == 0"), "A0", parse_predicate("true"));
  f = apply_skip(apply_skip(f, "A1"), "A2");
  const auto [fu, fr] = check_tree(f);
  CHECK(fr.root == Status::Failed);
  CHECK(fu.find("A1")->status == Status::Proven);
  CHECK(fu.find("A2")->status == Status::Failed);
  CHECK(cex(item(fr, "A2.skip").result) == "{x: -4}");

  auto p = apply_composition(unit_over("x == 0", "x == 2"), "A0", parse_predicate("x == 1"));
  p = apply_assignment(apply_assignment(p, "A1", "x", parse_expr("x + 1")), "A2", "x",
                       parse_expr("x + 1"));
  const auto [pu, pr] = check_tree(p);
  CHECK(pr.root == Status::Proven);
  CHECK(pr.open.empty());
  CHECK(pu.root.status == Status::Proven);
  // The input unit is left as it was.
  CHECK(p.root.status == Status::Open);
  CHECK_FALSE(p.root.children[0].obligations[0].result.has_value());
}

TEST_CASE("extract program") {
  CHECK(print(extract_program(apply_skip(unit_over("true", "true"), "A0"))) == "skip;\n");
  const auto u = apply_composition(unit_over("true", "true"), "A0", parse_predicate("true"));
  const auto partial = apply_assignment(u, "A2", "x", parse_expr("1"));
  const std::string text = print(extract_program(partial));
  CHECK(text.find("⟨abstract A1⟩") != std::string::npos);
  CHECK(text.find("x := 1;") != std::string::npos);
}

TEST_CASE("post-hoc check of a proven tree") {
  auto p = apply_composition(unit_over("x == 0", "x == 2"), "A0", parse_predicate("x == 1"));
  p = apply_assignment(apply_assignment(p, "A1", "x", parse_expr("x + 1")), "A2", "x",
                       parse_expr("x + 1"));
  for (const auto& o : post_hoc_obligations(p)) CHECK_MESSAGE(check_implication(o).is_valid(), o.id);
}
