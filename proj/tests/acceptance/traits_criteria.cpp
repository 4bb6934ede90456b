#include <algorithm>
#include <chrono>
#include <sstream>

#include "cbc/kernel/print.hpp"
#include "cbc/traits/calculus.hpp"
#include "cbc/traits/files.hpp"
#include "criteria.hpp"
#include "random_traits.hpp"

namespace acceptance {

namespace {

using namespace cbc::traits;

constexpr int kTables = 500;
constexpr int kPairs = 500;
constexpr int kAbstractions = 500;

TraitTable fixture_table() {
  const std::string dir = root() + "/tests/fixtures/traits/";
  std::vector<std::string> traits;
  for (const auto* n : {"MaxETrait1", "MaxETrait2", "MaxETrait3", "MaxETrait4", "MinE", "MaxElement1"}) {
    traits.push_back(dir + n + ".trait");
  }
  return load_table(traits, {dir + "compositions.tc"});
}

double since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

bool all_concrete(const FlatDecl& d) {
  return std::none_of(d.body.methods.begin(), d.body.methods.end(), [](const Method& m) { return m.is_abstract(); });
}

/// Re-verifies `b` as the body of a standalone trait named C.
bool reverifies(const Body& b) {
  FlatTable t;
  t.decls.push_back({"C", false, b});
  return check_body(t, "C", b).ok();
}

std::string show(const Body& b) {
  std::string out;
  for (const auto& m : b.methods) out += print(m);
  return out;
}

std::vector<std::vector<long long>> all_lists() {
  std::vector<std::vector<long long>> out;
  std::vector<std::vector<long long>> layer{{}};
  for (int len = 1; len <= 3; ++len) {
    std::vector<std::vector<long long>> next;
    for (const auto& prefix : layer) {
      for (long long v = -2; v <= 2; ++v) {
        auto x = prefix;
        x.push_back(v);
        next.push_back(x);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = next;
  }
  return out;
}

cbc::Expr list_expr(const std::vector<long long>& xs) {
  std::vector<cbc::Expr> elems;
  for (auto x : xs) elems.push_back(cbc::int_lit(x));
  return cbc::seq_lit(std::move(elems));
}

}  // namespace

Outcome trait_fixtures() {
  const auto start = std::chrono::steady_clock::now();
  const Flattening f = flatten_table(fixture_table());
  std::ostringstream d;
  bool ok = true;
  auto fail = [&](const std::string& why) {
    if (ok) d << why;
    ok = false;
  };
  for (const auto& e : f.errors) fail(e.where + ": " + e.message);
  for (const auto& c : f.compositions) {
    if (!c.ok()) fail("composition " + c.owner + "." + c.method + " not valid");
  }
  for (const auto& v : f.verifications) {
    if (!v.result.is_valid()) fail("verification " + v.owner + "." + v.method + " not valid");
  }
  for (const auto* name : {"MaxE", "ComposedMax"}) {
    const FlatDecl* decl = f.table.find(name);
    if (!decl) {
      fail(std::string(name) + " missing");
      continue;
    }
    if (!all_concrete(*decl)) fail(std::string(name) + " keeps abstract methods");
    if (!check_body(f.table, name, decl->body).ok()) fail(std::string(name) + " does not re-verify");
  }
  std::vector<const CompositionCheck*> mine;
  for (const auto& c : f.compositions) {
    if (c.owner == "MinEComposed") mine.push_back(&c);
  }
  if (mine.size() != 1 || mine[0]->method != "accessHead" || !mine[0]->ok()) {
    fail("MinE + MaxETrait3 checked " + std::to_string(mine.size()) + " pairs");
  }
  const double secs = since(start);
  if (secs >= 10) fail("took " + std::to_string(secs) + "s");
  if (ok) {
    d << "MaxE and ComposedMax re-verify; MinE + MaxETrait3 checked 1 pair (accessHead, pre and post valid); "
      << f.compositions.size() << " pairs, " << f.verifications.size() << " method verifications";
  }
  return {ok, d.str()};
}

Outcome flattening_soundness() {
  cbc::testing::TraitGen gen(4242);
  const std::vector<Body> pool = gen.fragments(40);
  int accepted = 0;
  int violations = 0;
  std::string first;
  for (int k = 0; k < kTables; ++k) {
    TraitTable t;
    const int traits = 2 + gen.pick(3);
    std::vector<std::string> names;
    for (int i = 0; i < traits; ++i) {
      names.push_back("T" + std::to_string(i));
      t.decls.push_back({names.back(), false, lit(pool[gen.pick(pool.size())]), ""});
    }
    const int composed = 1 + gen.pick(3);
    for (int i = 0; i < composed; ++i) {
      TraitExpr e = ref(names[gen.pick(names.size())]);
      const int terms = 1 + gen.pick(2);
      for (int j = 0; j < terms; ++j) e = plus(e, ref(names[gen.pick(names.size())]));
      if (gen.pick(3) == 0) {
        const auto& ms = cbc::testing::TraitGen::method_names();
        e = make_abstract(e, ms[gen.pick(ms.size())]);
      }
      const std::string name = "D" + std::to_string(i);
      t.decls.push_back({name, i == composed - 1 && gen.pick(4) == 0, e, ""});
      names.push_back(name);
    }
    const Flattening f = flatten_table(t);
    if (!f.ok()) continue;
    ++accepted;
    for (const auto& d : f.table.decls) {
      if (!check_body(f.table, d.name, d.body).ok()) {
        ++violations;
        if (first.empty()) first = "table " + std::to_string(k) + ", " + d.name + ":\n" + show(d.body);
      }
    }
  }
  std::ostringstream d;
  d << accepted << "/" << kTables << " tables accepted, " << violations << " violations";
  if (!first.empty()) d << "; first: " << first;
  return {violations == 0 && accepted > 0, d.str()};
}

Outcome composition_soundness() {
  cbc::testing::TraitGen gen(777);
  const std::vector<Body> pool = gen.fragments(40);
  int composed = 0;
  int violations = 0;
  std::string first;
  std::vector<Body> results;
  for (int k = 0; k < kPairs; ++k) {
    const Body& b1 = pool[gen.pick(pool.size())];
    const Body& b2 = pool[gen.pick(pool.size())];
    ComposeEnv env;
    env.owner = "C";
    Body b;
    try {
      b = compose_bodies(b1, b2, env);
    } catch (const TraitError&) {
      continue;
    }
    ++composed;
    results.push_back(b);
    if (!reverifies(b)) {
      ++violations;
      if (first.empty()) first = "pair " + std::to_string(k) + ":\n" + show(b);
    }
  }
  int abstracted = 0;
  for (int k = 0; k < kAbstractions; ++k) {
    const Body& b = k % 2 == 0 || results.empty() ? pool[gen.pick(pool.size())] : results[gen.pick(results.size())];
    const Body r = make_abstract(b, b.methods[gen.pick(b.methods.size())].name);
    ++abstracted;
    if (!reverifies(r)) {
      ++violations;
      if (first.empty()) first = "makeAbstract " + std::to_string(k) + ":\n" + show(r);
    }
  }
  std::ostringstream d;
  d << composed << "/" << kPairs << " compositions accepted, " << abstracted << "/" << kAbstractions
    << " makeAbstract applications, " << violations << " violations";
  if (!first.empty()) d << "; first: " << first;
  return {violations == 0 && composed > 0, d.str()};
}

Outcome interpreter_correctness() {
  const auto start = std::chrono::steady_clock::now();
  const Flattening f = flatten_table(fixture_table());
  if (!f.ok()) return {false, "fixtures do not flatten"};
  const auto lists = all_lists();
  int agree = 0;
  std::string first;
  for (const auto& xs : lists) {
    const long long hi = *std::max_element(xs.begin(), xs.end());
    const long long lo = *std::min_element(xs.begin(), xs.end());
    const auto mx = evaluate(f.table, cbc::call(cbc::new_("MaxE", {}), "maxElement", {list_expr(xs)})).value;
    const auto mn = evaluate(f.table, cbc::call(cbc::new_("MinEComposed", {}), "minElement", {list_expr(xs)})).value;
    if (mx == cbc::Value::integer(hi) && mn == cbc::Value::integer(lo)) {
      ++agree;
    } else if (first.empty()) {
      first = cbc::to_string(cbc::Value::sequence({xs.begin(), xs.end()})) + ": max " + cbc::to_string(mx) +
              ", min " + cbc::to_string(mn);
    }
  }
  const double secs = since(start);
  std::ostringstream d;
  d << agree << "/" << lists.size() << " lists agree with brute-force max and min";
  if (!first.empty()) d << "; first mismatch " << first;
  if (secs >= 30) d << "; too slow";
  return {agree == static_cast<int>(lists.size()) && secs < 30, d.str()};
}

}  // namespace acceptance
