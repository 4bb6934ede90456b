#pragma once

// Syntactic operations the refinement rules are built from: capture-avoiding
// substitution, free variables, fresh names and alpha-renaming.

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cbc/kernel/ast.hpp"

namespace cbc {

using NameSet = std::set<std::string, std::less<>>;

/// What a substitution replaces. `Var` targets the free occurrences of a
/// program variable, `Result` the distinguished post-state value and
/// `OldVar` the pre-state occurrences old(x).
struct SubstTarget {
  enum class Kind { Var, Result, OldVar };
  Kind kind = Kind::Var;
  std::string name;

  static SubstTarget variable(std::string n) { return {Kind::Var, std::move(n)}; }
  static SubstTarget result() { return {Kind::Result, {}}; }
  static SubstTarget old_of(std::string n) { return {Kind::OldVar, std::move(n)}; }
};

/// Substitution never descends into old(x) when replacing the variable x:
/// old(x) names the pre-state and is unaffected by assignments.
Expr substitute(const Expr& e, const SubstTarget& target, const Expr& replacement);
Predicate substitute(const Predicate& p, const SubstTarget& target, const Expr& replacement);

inline Predicate substitute(const Predicate& p, const std::string& var, const Expr& e) {
  return substitute(p, SubstTarget::variable(var), e);
}
inline Expr substitute(const Expr& x, const std::string& var, const Expr& e) {
  return substitute(x, SubstTarget::variable(var), e);
}

/// Simultaneous substitution of several variables.
Expr substitute_all(const Expr& e, const std::vector<std::pair<std::string, Expr>>& subst);
Predicate substitute_all(const Predicate& p,
                         const std::vector<std::pair<std::string, Expr>>& subst);

/// Replaces every old(x) by the plain variable x.
Predicate resolve_old(const Predicate& p);

NameSet free_vars(const Expr& e);
NameSet free_vars(const Predicate& p);
/// Variables read by a statement, including guards, invariants and variants.
NameSet free_vars(const Statement& s);

/// Every identifier occurring anywhere in the term, bound or free.
NameSet all_names(const Predicate& p);
NameSet all_names(const Statement& s);

bool mentions_result(const Expr& e);
bool mentions_result(const Predicate& p);
bool mentions_old(const Expr& e);
bool mentions_old(const Predicate& p);

/// `base` if free, otherwise base'1, base'2, ... (smallest unused suffix).
std::string fresh_name(const std::string& base, const NameSet& taken);

/// Old-name / new-name pairs in the order the declarations were renamed.
using Renaming = std::vector<std::pair<std::string, std::string>>;

/// Renames every local declaration whose name is in `taken`, consistently
/// across the remainder of its enclosing sequence.
std::pair<Statement, Renaming> alpha_rename(const Statement& s, const NameSet& taken);

/// Variables assigned (or declared) anywhere in the statement.
NameSet assigned_vars(const Statement& s);
/// Local declarations in the statement, in program order.
std::vector<std::pair<std::string, Type>> local_decls(const Statement& s);

/// Flattens nested Seq nodes into their program-order parts.
std::vector<Statement> seq_parts(const Statement& s);

bool contains_abstract(const Statement& s);
std::vector<std::string> block_refs(const Statement& s);

}  // namespace cbc
