#pragma once

#include <string>
#include <vector>

#include "cbc/traits/calculus.hpp"

namespace cbc::traits::detail {

std::string type_label(const Type& t);

/// g => p, pushed through conjunctions and merged into nested implications.
Predicate guarded(const Predicate& g, const Predicate& p);

/// Getter sorts of every object sort reachable from the variables.
ClassFields class_fields(const FlatTable& ds, const std::vector<VarDecl>& vars);

}  // namespace cbc::traits::detail
