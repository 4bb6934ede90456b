#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cbc/kernel/ast.hpp"
#include "cbc/kernel/syntax.hpp"
#include "cbc/refine/status.hpp"

namespace cbc {

struct BlockDecl {
  std::string name;
  Contract contract;
  std::vector<VarDecl> accessible;
  std::vector<VarDecl> assignable;
  /// Where the block was introduced: a node id or the enclosing block's name.
  std::string origin;
  std::optional<Statement> instantiation;
  /// The instantiation after block-to-method renaming.
  std::optional<Statement> renamed;
  Renaming renaming;
  std::vector<VarDecl> locals;
  std::vector<CheckedObligation> obligations;
  Status status = Status::Open;
};

/// The verification unit a block instantiation is checked as: accessible
/// variables are parameters, assignable ones ambient state.
struct BlockMethod {
  std::string name;
  std::vector<VarDecl> params;
  std::vector<VarDecl> state;
  Type ret = Type::unit();
  Contract contract;
  Statement body;
  Renaming renaming;
};

}  // namespace cbc
