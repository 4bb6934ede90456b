#include <cstdlib>
#include <iostream>

#include "CLI11.hpp"
#include "cbc/cli/project.hpp"
#include "cbc/kernel/parser.hpp"

namespace {

struct Options {
  std::string dir;
  std::string target;
  std::string out = "smt";
  std::string cls;
  std::string method;
  std::vector<std::string> args;
  std::string receiver;
  long fuel = 100000;
  bool json = false;
  cbc::ProverConfig cfg;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("project", o.dir, "Project directory")->required();
  cmd->add_option("--int-bound", o.cfg.int_bound, "Integers range over [-N, N]")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seq-len", o.cfg.max_seq_len, "Longest enumerated list")->check(CLI::NonNegativeNumber);
  cmd->add_option("--seq-elem-bound", o.cfg.seq_elem_bound, "List elements range over [-N, N]")
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--json", o.json, "Print the report as JSON");
}

int emit(const cbc::Report& r, bool json) {
  if (json) {
    std::cout << cbc::to_json(r).dump(2) << "\n";
  } else {
    std::cout << cbc::to_text(r);
  }
  return r.exit_code();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Correctness-by-construction toolkit"};
  app.require_subcommand(1);
  Options o;

  auto* check = app.add_subcommand("check", "Check refinement scripts");
  add_common(check, o);
  check->add_option("--method", o.target, "Only this method");

  auto* smt = app.add_subcommand("emit-smt", "Write one SMT-LIB2 script per obligation");
  add_common(smt, o);
  smt->add_option("--method", o.target, "Only this method");
  smt->add_option("--out", o.out, "Output directory");

  auto* flatten = app.add_subcommand("flatten", "Flatten and verify trait compositions");
  add_common(flatten, o);
  flatten->add_option("name", o.target, "Print only this trait or class");

  auto* run = app.add_subcommand("run", "Evaluate a method call on a flattened class");
  add_common(run, o);
  run->footer("Remaining arguments are argument values, e.g. 3 or [3,1,2].");
  run->add_option("class", o.cls, "Class name")->required();
  run->add_option("method", o.method, "Method name")->required();
  run->allow_extras();
  run->add_option("--receiver", o.receiver, "Receiver expression (default: new Class())");
  run->add_option("--fuel", o.fuel, "Maximum number of reduction steps")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (const char* env = std::getenv("CBCFORGE_PROVER_BOUND")) {
    try {
      o.cfg.int_bound = std::stoll(env);
    } catch (const std::exception&) {
      std::cerr << "CBCFORGE_PROVER_BOUND must be an integer\n";
      return 2;
    }
    if (o.cfg.int_bound < 0) {
      std::cerr << "CBCFORGE_PROVER_BOUND must be non-negative\n";
      return 2;
    }
  }

  try {
    const cbc::Project project = cbc::load_project(o.dir, o.cfg);
    if (check->parsed()) return emit(cbc::cmd_check(project, o.target), o.json);
    if (flatten->parsed()) return emit(cbc::cmd_flatten(project, o.target), o.json);
    if (run->parsed()) o.args = run->remaining();
    if (run->parsed()) return emit(cbc::cmd_run(project, o.cls, o.method, o.args, o.fuel, o.receiver), o.json);
    if (smt->parsed()) {
      const auto files = cbc::cmd_emit_smt(project, o.target, o.out);
      for (const auto& f : files) std::cout << f << "\n";
      std::cout << files.size() << " scripts written\n";
      return 0;
    }
  } catch (const cbc::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
