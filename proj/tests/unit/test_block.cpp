#include "cbc/block/block.hpp"
#include "cbc/kernel/eval.hpp"
#include "cbc/kernel/parser.hpp"
#include "cbc/kernel/print.hpp"
#include "cbc/kernel/syntax.hpp"
#include "doctest.h"

using namespace cbc;

namespace {

const char* kIntm1 = "list.size() > 0 && i == list.get(0) && j == 1";
const char* kIntm2 = "list.contains(i) && (forall q in indices(list): i >= list.get(q))";

struct Parsed {
  Statement body;
  std::vector<BlockFrameDecl> frames;
};

Parsed parse_body(const std::string& src) {
  Parser p(src);
  Statement s = p.statements();
  REQUIRE(p.at_end());
  return {s, p.frames};
}

MethodUnit max_element_until_b1() {
  MethodUnit u = make_unit(
      "maxElement", {{"list", Type::sequence()}}, Type::integer(),
      {parse_predicate("list.size() > 0"),
       parse_predicate("list.contains(result) && (forall q in indices(list): result >= list.get(q))")});
  u = apply_composition(u, "A0", parse_predicate(kIntm1));
  u = apply_composition(u, "A2", parse_predicate(kIntm2));
  u = apply_composition(u, "A1", parse_predicate("list.size() > 0 && i == list.get(0)"));
  u = apply_assignment(u, "A5", "i", parse_expr("list.get(0)"), Type::integer());
  u = apply_assignment(u, "A6", "j", parse_expr("1"), Type::integer());
  u = apply_assignment(u, "A4", "result", parse_expr("i"));
  return introduce_block(u, "A3", "B1", parse_predicate(kIntm1), parse_predicate(kIntm2),
                         {"list"}, {"i", "j"});
}

const char* kB1Body = R"(
  while (j < list.size())
    invariant list.contains(i) && j > 0 && j <= list.size() &&
      (forall q in [0, j - 1]: i >= list.get(q))
    decreases list.size() - j
  {
    block B2
      requires list.contains(i) && j > 0 && j < list.size() &&
        (forall q in [0, j - 1]: i >= list.get(q))
      ensures list.contains(i) && j > 0 && j < list.size() &&
        (forall q in [0, j]: i >= list.get(q))
      accessible list, j assignable i;
    j := j + 1;
  }
)";

MethodUnit max_element() {
  const Parsed b1 = parse_body(kB1Body);
  MethodUnit u = instantiate_block(max_element_until_b1(), "B1", b1.body, b1.frames);
  return instantiate_block(u, "B2", parse_statement("if (list.get(j) > i) { i := list.get(j); }"));
}

const ReportItem& item(const TreeReport& r, const std::string& id) {
  for (const auto& i : r.items) {
    if (i.id == id) return i;
  }
  FAIL("no obligation " << id);
  throw std::logic_error("unreachable");
}

}  // namespace

TEST_CASE("block introduction") {
  const MethodUnit u = max_element_until_b1();
  const auto [checked, rep] = check_tree(u);
  CHECK(item(rep, "A3.block-pre").result.is_valid());
  CHECK(item(rep, "A3.block-post").result.is_valid());
  CHECK(rep.root == Status::Open);
  CHECK(rep.open == std::vector<std::string>{"B1"});
  REQUIRE(u.block("B1"));
  CHECK(u.block("B1")->origin == "A3");
  CHECK_THROWS_AS(introduce_block(apply_composition(u, "A1", parse_predicate("true")), "A7", "B1",
                                  parse_predicate("true"), parse_predicate("true"), {}, {}),
                  RefineError);
}

TEST_CASE("block contracts are checked against the frame") {
  MethodUnit u = make_unit("m", {{"n", Type::integer()}}, Type::unit(),
                           {parse_predicate("true"), parse_predicate("true")});
  u.locals = {{"x", Type::integer()}, {"y", Type::integer()}};
  auto intro = [&](const char* pre, const char* post, std::vector<std::string> acc,
                   std::vector<std::string> asg) {
    return introduce_block(u, "A0", "B", parse_predicate(pre), parse_predicate(post), acc, asg);
  };
  CHECK_NOTHROW(intro("x >= 0", "x > n", {"n"}, {"x"}));
  CHECK_THROWS_AS(intro("y >= 0", "true", {"n"}, {"x"}), RefineError);
  CHECK_THROWS_AS(intro("true", "x == old(x) + 1", {}, {"x"}), RefineError);
  CHECK_THROWS_AS(intro("true", "true", {"z"}, {}), RefineError);
  CHECK_THROWS_AS(intro("true", "true", {}, {"n"}), RefineError);
  CHECK_THROWS_AS(intro("x", "true", {}, {"x"}), RefineError);
}

TEST_CASE("trivial instantiation") {
  MethodUnit u = make_unit("m", {}, Type::unit(), {parse_predicate("true"), parse_predicate("true")});
  u.locals = {{"x", Type::integer()}};
  u = introduce_block(u, "A0", "B", parse_predicate("x > 0"), parse_predicate("x > 0"), {}, {"x"});
  u = instantiate_block(u, "B", skip());
  const auto [checked, rep] = check_tree(u);
  CHECK(item(rep, "B.instantiation").result.is_valid());

  MethodUnit e = make_unit("m", {}, Type::unit(), {parse_predicate("true"), parse_predicate("true")});
  e = introduce_block(e, "A0", "Empty", parse_predicate("true"), parse_predicate("true"), {}, {});
  e = instantiate_block(e, "Empty", skip());
  const BlockMethod m = block_to_method(e, "Empty");
  CHECK(m.params.empty());
  CHECK(m.state.empty());
  CHECK(m.ret.kind == Type::Kind::Unit);
  CHECK(m.body == skip());
  CHECK(m.renaming.empty());
  CHECK(check_tree(e).second.root == Status::Proven);
  CHECK_THROWS_AS(instantiate_block(e, "Empty", skip()), RefineError);
  CHECK_THROWS_AS(instantiate_block(e, "Other", skip()), RefineError);
}

TEST_CASE("instantiation respects the frame") {
  MethodUnit u = make_unit("m", {{"n", Type::integer()}}, Type::unit(),
                           {parse_predicate("true"), parse_predicate("true")});
  u.locals = {{"x", Type::integer()}, {"y", Type::integer()}};
  u = introduce_block(u, "A0", "B", parse_predicate("true"), parse_predicate("true"), {"n"}, {"x"});
  CHECK_THROWS_AS(instantiate_block(u, "B", parse_statement("y := 1;")), RefineError);
  CHECK_THROWS_AS(instantiate_block(u, "B", parse_statement("x := y;")), RefineError);
  CHECK_THROWS_AS(instantiate_block(u, "B", abstract_stmt("A9")), RefineError);
  CHECK_NOTHROW(instantiate_block(u, "B", parse_statement("int t := n; x := t + 1;")));
  // A nested block needs a frame and may not widen the writable set.
  const Parsed missing = parse_body("block C requires true ensures true;");
  CHECK_THROWS_AS(instantiate_block(u, "B", missing.body, {}), RefineError);
  const Parsed widen = parse_body("block C requires true ensures true accessible n assignable n;");
  CHECK_THROWS_AS(instantiate_block(u, "B", widen.body, widen.frames), RefineError);
  const Parsed dup = parse_body("block B requires true ensures true assignable x;");
  CHECK_THROWS_AS(instantiate_block(u, "B", dup.body, dup.frames), RefineError);
}

TEST_CASE("maxElement through blocks") {
  const MethodUnit u = max_element();
  const auto [checked, rep] = check_tree(u);
  for (const auto& i : rep.items) CHECK_MESSAGE(i.result.is_valid(), i.id);
  CHECK(rep.root == Status::Proven);
  CHECK(rep.open.empty());
  CHECK(checked.block("B1")->status == Status::Proven);
  CHECK(checked.block("B2")->origin == "B1");

  // Block obligations only mention the block's own scope.
  for (const auto& b : checked.blocks) {
    for (const auto& c : b.obligations) {
      NameSet scope;
      for (const auto& v : c.extra) scope.insert(v.name);
      for (const auto& v : free_vars(c.ob.hypothesis)) CHECK_MESSAGE(scope.count(v), c.ob.id, " ", v);
      for (const auto& v : free_vars(c.ob.conclusion)) CHECK_MESSAGE(scope.count(v), c.ob.id, " ", v);
    }
  }

  const std::string program = print(extract_program(u));
  CHECK(program.find("block") == std::string::npos);
  CHECK(program.find("while (j < list.size())") != std::string::npos);
  for (const auto& o : post_hoc_obligations(u)) CHECK_MESSAGE(check_implication(o).is_valid(), o.id);
}

TEST_CASE("a faulty nested instantiation fails the tree") {
  const Parsed b1 = parse_body(kB1Body);
  MethodUnit u = instantiate_block(max_element_until_b1(), "B1", b1.body, b1.frames);
  CHECK(check_tree(u).second.root == Status::Open);
  u = instantiate_block(u, "B2", parse_statement("if (list.get(j) < i) { i := list.get(j); }"));
  const auto [checked, rep] = check_tree(u);
  const auto& r = item(rep, "B2.instantiation").result;
  CHECK(r.kind == ProofResult::Kind::Invalid);
  CHECK(checked.block("B2")->status == Status::Failed);
  CHECK(checked.block("B1")->status == Status::Failed);
  CHECK(rep.root == Status::Failed);
}

TEST_CASE("block locals are renamed away from the method's names") {
  MethodUnit u = make_unit("m", {{"list", Type::sequence()}}, Type::unit(),
                           {parse_predicate("true"), parse_predicate("true")});
  u.locals = {{"i", Type::integer()}, {"j", Type::integer()}};
  u = introduce_block(u, "A0", "B", parse_predicate("true"), parse_predicate("true"), {"list"},
                      {"i"});
  const Statement original = parse_statement("int j := list.size(); i := j * 2; j := j + 1; i := i + j;");
  u = instantiate_block(u, "B", original);
  const BlockMethod m = block_to_method(u, "B");
  REQUIRE(m.renaming.size() == 1);
  CHECK(m.renaming[0] == std::make_pair(std::string("j"), std::string("j'1")));
  CHECK(print(m.body).find("j'1 := j'1 + 1;") != std::string::npos);
  CHECK(m.params == std::vector<VarDecl>{{"list", Type::sequence()}});
  CHECK(m.state == std::vector<VarDecl>{{"i", Type::integer()}});

  // Running the renamed body inside the method agrees with running the
  // original body as a standalone unit over the block's frame only.
  const Statement inlined = extract_program(u);
  const Bounds b{};
  int runs = 0;
  for (const auto& l : enumerate_values(Type::sequence(), b)) {
    for (const auto& i0 : enumerate_values(Type::integer(), b)) {
      for (const auto& j0 : enumerate_values(Type::integer(), b)) {
        Env alone;
        alone.push("list", l);
        alone.push("i", i0);
        Env inside;
        inside.push("list", l);
        inside.push("i", i0);
        inside.push("j", j0);
        long fuel = 10;
        exec(original, alone, {}, {}, fuel);
        fuel = 10;
        exec(inlined, inside, {}, {}, fuel);
        CHECK(*alone.find("i") == *inside.find("i"));
        CHECK(inside.slots()[2].second == j0);
        ++runs;
      }
    }
  }
  CHECK(runs > 1000);
}

TEST_CASE("nested blocks four deep") {
  MethodUnit u = make_unit("m", {}, Type::unit(), {parse_predicate("x == 0"), parse_predicate("x == 4")});
  u.locals = {{"x", Type::integer()}};
  u = introduce_block(u, "A0", "B1", parse_predicate("x == 0"), parse_predicate("x == 4"), {}, {"x"});
  for (int k = 1; k <= 3; ++k) {
    const std::string next = "B" + std::to_string(k + 1);
    const Parsed p = parse_body("x := x + 1; block " + next + " requires x == " + std::to_string(k) +
                                " ensures x == 4 assignable x;");
    u = instantiate_block(u, "B" + std::to_string(k), p.body, p.frames);
    CHECK(check_tree(u).second.root == Status::Open);
  }
  CHECK(u.block("B4")->origin == "B3");
  const MethodUnit good = instantiate_block(u, "B4", parse_statement("x := x + 1;"));
  const auto [checked, rep] = check_tree(good);
  CHECK(rep.root == Status::Proven);
  for (const auto& b : checked.blocks) CHECK(b.status == Status::Proven);
  CHECK(print(extract_program(good)) == "x := x + 1;\nx := x + 1;\nx := x + 1;\nx := x + 1;\n");
  for (const auto& o : post_hoc_obligations(good)) CHECK(check_implication(o).is_valid());

  const MethodUnit bad = instantiate_block(u, "B4", parse_statement("x := x + 2;"));
  const auto [bc, br] = check_tree(bad);
  CHECK(br.root == Status::Failed);
  CHECK(bc.block("B1")->status == Status::Failed);
}
