#pragma once

// Project loading and the commands behind the cbcforge executable.

#include <optional>
#include <string>
#include <vector>

#include "cbc/prover/obligation.hpp"
#include "cbc/refine/script.hpp"
#include "json.hpp"

namespace cbc {

/// Every .cbc, .trait and .tc file directly inside the root directory,
/// in file-name order.
struct Project {
  std::string root;
  std::vector<Script> scripts;
  std::vector<std::string> trait_files;
  std::vector<std::string> tc_files;
  ProverConfig cfg;
};

Project load_project(const std::string& root, const ProverConfig& cfg = {});

struct ReportEntry {
  std::string id;
  std::string provenance;
  ProofResult result;
};

struct UnitStatus {
  std::string name;
  Status status = Status::Open;
  std::string program;
};

struct Report {
  std::string command;
  std::vector<ReportEntry> items;
  std::vector<std::string> open;
  std::vector<UnitStatus> units;
  /// Failures that are not obligations (composition errors and the like).
  std::vector<std::string> errors;
  std::string listing;
  /// Result of `run`.
  std::optional<Value> value;
  long steps = 0;

  /// "pass", "fail" or "open".
  std::string overall() const;
  int exit_code() const;
};

/// Checks every method (or only `target`); obligation ids are prefixed with
/// the method name.
Report cmd_check(const Project& p, const std::string& target = "");

/// Writes one `<id>.smt2` per obligation of cmd_check; returns the paths.
std::vector<std::string> cmd_emit_smt(const Project& p, const std::string& target,
                                      const std::string& out_dir);

/// Flattens every trait and class; the listing shows `target` (every
/// class when empty).
Report cmd_flatten(const Project& p, const std::string& target = "");

/// Evaluates receiver.method(args) in the flattened table; the receiver
/// defaults to `new cls()`. Arguments are value literals such as 3 or [3, 1, 2].
Report cmd_run(const Project& p, const std::string& cls, const std::string& method,
               const std::vector<std::string>& args, long fuel = 100000,
               const std::string& receiver = "");

nlohmann::ordered_json to_json(const Report& r);
std::string to_text(const Report& r);
nlohmann::ordered_json value_json(const Value& v);

}  // namespace cbc
