#pragma once

#include <string>
#include <vector>

#include "cbc/kernel/ast.hpp"

namespace cbc {

std::string print(const Expr& e);
std::string print(const Predicate& p);
std::string print(const BoundedDomain& d);
/// Multi-line rendering; abstract statements appear as ⟨abstract A1⟩ holes.
std::string print(const Statement& s, int indent = 0);

/// Guards of an if/elseif/else chain in guarded-command form: branch i
/// fires when its condition holds and no earlier one did.
std::vector<Expr> chain_guards(const std::vector<Expr>& conds, bool has_else);

}  // namespace cbc
