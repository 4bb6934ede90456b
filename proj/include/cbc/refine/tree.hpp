#pragma once

// Refinement trees of classic CbC. Every apply operation returns a new
// MethodUnit; the argument is left untouched.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cbc/block/decl.hpp"
#include "cbc/kernel/ast.hpp"
#include "cbc/prover/obligation.hpp"
#include "cbc/prover/wp.hpp"
#include "cbc/refine/status.hpp"

namespace cbc {

/// The rule applied at a node and its arguments, as written.
struct RuleRecord {
  std::string name;
  std::string args;
};

struct RefinementNode {
  std::string id;
  Predicate pre;
  Statement stmt;
  Predicate post;
  std::optional<RuleRecord> rule;
  std::vector<RefinementNode> children;
  std::vector<CheckedObligation> obligations;
  Status status = Status::Open;
};

struct MethodUnit {
  std::string name;
  std::vector<VarDecl> params;
  Type ret = Type::unit();
  Contract contract;
  RefinementNode root;
  /// Locals introduced by declare-then-assign, in creation order.
  std::vector<VarDecl> locals;
  std::vector<BlockDecl> blocks;
  /// Contracts of callable methods, by name.
  MethodTable callees;
  int next_id = 1;

  /// Parameters, locals and `result` (when the method returns a value).
  std::vector<VarDecl> declared() const;
  const RefinementNode* find(const std::string& id) const;
  const BlockDecl* block(const std::string& name) const;
};

/// `result` in the contract becomes an ordinary variable of the unit.
MethodUnit make_unit(std::string name, std::vector<VarDecl> params, Type ret, Contract contract);

MethodUnit apply_skip(const MethodUnit& u, const std::string& node);
/// With `declare`, introduces a new local of that type (declare-then-assign).
MethodUnit apply_assignment(const MethodUnit& u, const std::string& node, const std::string& target,
                            const Expr& e, std::optional<Type> declare = std::nullopt);
MethodUnit apply_composition(const MethodUnit& u, const std::string& node, const Predicate& mid);
MethodUnit apply_selection(const MethodUnit& u, const std::string& node,
                           const std::vector<Expr>& guards);
MethodUnit apply_repetition(const MethodUnit& u, const std::string& node, const Predicate& inv,
                            const Expr& variant, const Expr& guard);
MethodUnit apply_weaken_pre(const MethodUnit& u, const std::string& node, const Predicate& pre);
MethodUnit apply_strengthen_post(const MethodUnit& u, const std::string& node,
                                 const Predicate& post);
MethodUnit apply_method_call(const MethodUnit& u, const std::string& node,
                             const std::string& callee, const std::vector<Expr>& args,
                             const std::string& target);

struct ReportItem {
  std::string id;
  std::string provenance;
  ProofResult result;
};

struct TreeReport {
  Status root = Status::Open;
  std::vector<ReportItem> items;
  /// Abstract statements and blocks still awaiting refinement.
  std::vector<std::string> open;
};

/// Discharges every obligation and recomputes statuses bottom-up.
std::pair<MethodUnit, TreeReport> check_tree(const MethodUnit& u, const ProverConfig& cfg = {});

/// The concrete program; unrefined parts stay as abstract statements and
/// blocks are inlined recursively.
Statement extract_program(const MethodUnit& u);

/// pre => wp(extract_program(u), post) plus its loop side conditions.
std::vector<Obligation> post_hoc_obligations(const MethodUnit& u);

}  // namespace cbc
