#include "cbc/cli/project.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cbc/kernel/eval.hpp"
#include "cbc/kernel/parser.hpp"
#include "cbc/kernel/print.hpp"
#include "cbc/prover/smt.hpp"
#include "cbc/traits/files.hpp"

namespace cbc {

namespace fs = std::filesystem;

Project load_project(const std::string& root, const ProverConfig& cfg) {
  Project p;
  p.root = root;
  p.cfg = cfg;
  if (!fs::is_directory(root)) throw ParseError(root, 0, 0, "not a project directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(root)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    const auto ext = f.extension().string();
    if (ext == ".cbc") p.scripts.push_back(load_script(f.string()));
    if (ext == ".trait") p.trait_files.push_back(f.string());
    if (ext == ".tc") p.tc_files.push_back(f.string());
  }
  return p;
}

std::string Report::overall() const {
  const bool failed = !errors.empty() || std::any_of(items.begin(), items.end(), [](const ReportEntry& e) {
    return !e.result.is_valid();
  });
  if (failed || (command == "run" && !value)) return "fail";
  return open.empty() ? "pass" : "open";
}

int Report::exit_code() const { return overall() == "pass" ? 0 : 1; }

namespace {

void collect(const RefinementNode& n, std::vector<const CheckedObligation*>& out) {
  for (const auto& c : n.obligations) out.push_back(&c);
  for (const auto& c : n.children) collect(c, out);
}

template <class F>
void each_unit(const Project& p, const std::string& target, F&& f) {
  for (const auto& s : p.scripts) {
    for (const auto& u : s.methods) {
      if (target.empty() || target == u.name) f(u);
    }
  }
}

}  // namespace

Report cmd_check(const Project& p, const std::string& target) {
  Report r;
  r.command = "check";
  bool found = target.empty();
  each_unit(p, target, [&](const MethodUnit& u) {
    found = true;
    const auto [checked, rep] = check_tree(u, p.cfg);
    for (const auto& i : rep.items) r.items.push_back({u.name + "." + i.id, i.provenance, i.result});
    for (const auto& o : rep.open) r.open.push_back(u.name + "." + o);
    r.units.push_back({u.name, rep.root, print(extract_program(checked))});
  });
  if (!found) r.errors.push_back("no method named " + target);
  return r;
}

std::vector<std::string> cmd_emit_smt(const Project& p, const std::string& target,
                                      const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  std::vector<std::string> written;
  each_unit(p, target, [&](const MethodUnit& u) {
    const MethodUnit checked = check_tree(u, p.cfg).first;
    std::vector<const CheckedObligation*> obs;
    collect(checked.root, obs);
    for (const auto& b : checked.blocks) {
      for (const auto& c : b.obligations) obs.push_back(&c);
    }
    for (const auto* c : obs) {
      Obligation ob = c->ob;
      ob.id = u.name + "." + ob.id;
      const std::string path = (fs::path(out_dir) / (ob.id + ".smt2")).string();
      std::ofstream out(path, std::ios::binary);
      out << emit_smt(ob);
      if (!out) throw std::runtime_error("cannot write " + path);
      written.push_back(path);
    }
  });
  return written;
}

namespace {

traits::Flattening flatten_project(const Project& p, Report& r) {
  const traits::TraitTable table = traits::load_table(p.trait_files, p.tc_files);
  traits::Flattening f = traits::flatten_table(table, p.cfg);
  for (const auto& c : f.compositions) {
    const std::string id = c.owner + "." + c.method;
    const std::string why = "composition of " + c.method + " in " + c.owner;
    r.items.push_back({id + ".compose-pre", why, c.pre});
    r.items.push_back({id + ".compose-post", why, c.post});
  }
  for (const auto& v : f.verifications) {
    r.items.push_back({v.owner + "." + v.method, "verification of " + v.owner + "." + v.method, v.result});
  }
  for (const auto& e : f.errors) r.errors.push_back(e.where + ": " + e.message);
  return f;
}

}  // namespace

Report cmd_flatten(const Project& p, const std::string& target) {
  Report r;
  r.command = "flatten";
  const traits::Flattening f = flatten_project(p, r);
  if (!target.empty()) {
    if (const auto* d = f.table.find(target)) {
      r.listing = traits::print(*d);
    } else if (f.ok()) {
      r.errors.push_back("no trait or class named " + target);
    }
    return r;
  }
  for (const auto& d : f.table.decls) {
    if (d.is_class) r.listing += traits::print(d);
  }
  return r;
}

Report cmd_run(const Project& p, const std::string& cls, const std::string& method,
               const std::vector<std::string>& args, long fuel, const std::string& receiver) {
  Report r;
  r.command = "run";
  const traits::Flattening f = flatten_project(p, r);
  if (!f.ok()) return r;
  const auto* d = f.table.find(cls);
  if (!d || !d->is_class) {
    r.errors.push_back("no class named " + cls);
    return r;
  }
  const traits::Method* m = d->body.find(method);
  if (!m) throw ParseError("<arguments>", 1, 1, "class " + cls + " has no method " + method);
  if (m->params.size() != args.size()) {
    throw ParseError("<arguments>", 1, 1,
                     cls + "." + method + " takes " + std::to_string(m->params.size()) + " arguments, got " +
                         std::to_string(args.size()));
  }
  std::vector<Expr> actual;
  for (const auto& a : args) {
    Expr e = parse_expr(a);
    if (!traits::is_value(e)) throw ParseError("<argument>", 1, 1, "'" + a + "' is not a value");
    actual.push_back(e);
  }
  const Expr recv = receiver.empty() ? new_(cls, {}) : parse_expr(receiver);
  const Expr call_expr = call(recv, method, actual);
  ClassSchemas schemas;
  for (const auto& c : f.table.decls) {
    if (!c.is_class) continue;
    auto& names = schemas[c.name];
    for (const auto* g : f.table.getters(c.name)) names.push_back(g->name);
  }
  EvalContext ctx;
  ctx.schemas = &schemas;
  ctx.bounds = p.cfg.bounds();
  bool pre_holds = false;
  try {
    Env env;
    env.push("this", eval(recv, Env{}, ctx));
    for (std::size_t i = 0; i < actual.size(); ++i) env.push(m->params[i].name, eval(actual[i], Env{}, ctx));
    pre_holds = holds(m->spec.pre, env, ctx);
  } catch (const EvalError&) {
  }
  if (!pre_holds) {
    r.errors.push_back("arguments violate the precondition of " + cls + "." + method + ": " +
                       print(m->spec.pre));
    return r;
  }
  try {
    const traits::Evaluation ev = traits::evaluate(f.table, call_expr, fuel);
    r.value = ev.value;
    r.steps = ev.steps;
  } catch (const traits::StuckError& e) {
    r.errors.push_back(std::string("internal soundness alarm: a flattened program got stuck: ") + e.what());
  } catch (const traits::FuelExhausted& e) {
    r.errors.push_back(std::string("fuel exhausted: ") + e.what());
  }
  return r;
}

nlohmann::ordered_json value_json(const Value& v) {
  switch (v.kind) {
    case Type::Kind::Int: return v.i;
    case Type::Kind::Bool: return v.b;
    case Type::Kind::Seq: return v.seq;
    case Type::Kind::Object: {
      nlohmann::ordered_json fields = nlohmann::ordered_json::array();
      for (const auto& f : v.fields) fields.push_back(value_json(f));
      return {{"class", v.cls}, {"fields", fields}};
    }
    default: return to_string(v);
  }
}

nlohmann::ordered_json to_json(const Report& r) {
  nlohmann::ordered_json j;
  j["command"] = r.command;
  j["overall"] = r.overall();
  j["items"] = nlohmann::ordered_json::array();
  for (const auto& i : r.items) {
    nlohmann::ordered_json e;
    e["id"] = i.id;
    e["provenance"] = i.provenance;
    e["result"] = to_string(i.result.kind);
    if (i.result.kind == ProofResult::Kind::Valid) {
      e["counterexample"] = nullptr;
    } else {
      nlohmann::ordered_json cex = nlohmann::ordered_json::object();
      for (const auto& [name, v] : i.result.counterexample) cex[name] = value_json(v);
      e["counterexample"] = cex;
    }
    if (!i.result.reason.empty()) e["reason"] = i.result.reason;
    j["items"].push_back(e);
  }
  j["open"] = r.open;
  j["errors"] = r.errors;
  j["units"] = nlohmann::ordered_json::array();
  for (const auto& u : r.units) {
    j["units"].push_back({{"name", u.name}, {"status", to_string(u.status)}, {"program", u.program}});
  }
  if (!r.listing.empty()) j["listing"] = r.listing;
  if (r.command == "run") {
    j["value"] = r.value ? value_json(*r.value) : nlohmann::ordered_json();
    j["steps"] = r.steps;
  }
  return j;
}

std::string to_text(const Report& r) {
  std::ostringstream os;
  for (const auto& i : r.items) {
    if (r.command == "run" && i.result.kind == ProofResult::Kind::Valid) continue;
    os << to_string(i.result.kind) << "  " << i.id << "  (" << i.provenance << ")";
    if (i.result.kind != ProofResult::Kind::Valid) {
      os << "  " << format_assignment(i.result.counterexample);
      if (!i.result.reason.empty()) os << "  " << i.result.reason;
    }
    os << "\n";
  }
  for (const auto& o : r.open) os << "open  " << o << "\n";
  for (const auto& e : r.errors) os << "error  " << e << "\n";
  for (const auto& u : r.units) os << "method " << u.name << ": " << to_string(u.status) << "\n";
  if (!r.listing.empty()) os << r.listing;
  if (r.value) os << "value: " << to_string(*r.value) << " (" << r.steps << " steps)\n";
  os << r.command << ": " << r.overall() << " (" << r.items.size() << " obligations)\n";
  return os.str();
}

}  // namespace cbc
