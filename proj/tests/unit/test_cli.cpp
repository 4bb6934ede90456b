#include "cbc/cli/project.hpp"
#include "cbc/kernel/parser.hpp"
#include "doctest.h"

using namespace cbc;

TEST_CASE("check reports every obligation of a project") {
  const Project p = load_project("tests/fixtures/maxelement");
  const Report r = cmd_check(p);
  CHECK(r.overall() == "pass");
  CHECK(r.exit_code() == 0);
  REQUIRE(r.units.size() == 1);
  CHECK(r.units[0].status == Status::Proven);
  const auto j = to_json(r);
  CHECK(j["command"] == "check");
  CHECK(j["items"].size() == r.items.size());
  CHECK(j["items"][0].contains("counterexample"));
  CHECK(cmd_check(p, "missing").overall() == "fail");
}

TEST_CASE("check fails on mutants with counterexamples") {
  const Report r = cmd_check(load_project("tests/fixtures/mutants"), "absMissingZero");
  CHECK(r.exit_code() == 1);
  const auto j = to_json(r);
  bool found = false;
  for (const auto& i : j["items"]) {
    if (i["id"] == "absMissingZero.A0.coverage") {
      found = true;
      CHECK(i["result"] == "invalid");
      CHECK(i["counterexample"]["x"] == 0);
    }
  }
  CHECK(found);
}

TEST_CASE("flatten lists the composed class") {
  const Project p = load_project("tests/fixtures/traits");
  const Report r = cmd_flatten(p, "MaxE");
  CHECK(r.overall() == "pass");
  CHECK(r.listing.find("class MaxE {") == 0);
  CHECK(cmd_flatten(p, "Nope").overall() == "fail");
}

TEST_CASE("run evaluates a method of a flattened class") {
  const Project p = load_project("tests/fixtures/traits");
  const Report r = cmd_run(p, "MaxE", "maxElement", {"[3, 1, 2]"});
  REQUIRE(r.value);
  CHECK(*r.value == Value::integer(3));
  CHECK(r.exit_code() == 0);
  CHECK(to_json(r)["value"] == 3);

  const Report empty = cmd_run(p, "MaxE", "maxElement", {"[]"});
  CHECK_FALSE(empty.value);
  CHECK(empty.exit_code() == 1);

  CHECK(cmd_run(p, "MaxE", "maxElement", {"[5]"}, 3).exit_code() == 1);
  CHECK_THROWS_AS(cmd_run(p, "MaxE", "maxElement", {}), ParseError);
  CHECK_THROWS_AS(cmd_run(p, "MaxE", "maxElement", {"x + 1"}), ParseError);
}
