#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cbc/kernel/typing.hpp"
#include "cbc/refine/tree.hpp"

namespace cbc::detail {

/// The open abstract node `id`; throws RefineError otherwise.
RefinementNode& open_node(MethodUnit& u, const std::string& id);
std::string draw_id(MethodUnit& u);

CheckedObligation obligation(const std::string& id, const std::string& provenance,
                             const Predicate& h, const Predicate& c,
                             std::vector<VarDecl> extra = {});

TypeEnv type_env(const std::vector<VarDecl>& vars);
/// Throws RefineError when the predicate is ill sorted in the unit's scope.
void check_sorts(const Predicate& p, const TypeEnv& env);
Type check_sort(const Expr& e, const TypeEnv& env);

/// Every name the unit's statements and blocks declare or mention.
NameSet taken_names(const MethodUnit& u);

/// Rebuilds `s` with each abstract statement and block reference replaced
/// by `f` of it.
Statement replace_holes(const Statement& s, const std::function<Statement(const Statement&)>& f);

/// `result` in specifications denotes the unit's result variable.
Predicate ground_result(const Predicate& p);

std::string sanitize(const std::string& label);

}  // namespace cbc::detail
