#pragma once

// Sort checking for the shared expression language (lists, integers,
// booleans). Getter calls are not typed here.

#include <map>
#include <stdexcept>
#include <string>

#include "cbc/kernel/ast.hpp"

namespace cbc {

struct TypeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using TypeEnv = std::map<std::string, Type, std::less<>>;

/// `result` is looked up as an ordinary variable.
Type type_of(const Expr& e, const TypeEnv& env);
/// Throws TypeError unless every atom is boolean and every domain well sorted.
void check_predicate(const Predicate& p, const TypeEnv& env);

}  // namespace cbc
