#pragma once

// Weakest preconditions of concrete statements. Loops contribute their
// invariant as precondition plus separate side obligations.

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbc/kernel/ast.hpp"
#include "cbc/kernel/syntax.hpp"
#include "cbc/prover/obligation.hpp"

namespace cbc {

struct WpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Signature and contract of a callable method. The postcondition names the
/// returned value `result`; old(p) denotes the argument value.
struct MethodSig {
  std::string name;
  std::vector<VarDecl> params;
  Type ret;
  Contract contract;
};

using MethodTable = std::map<std::string, MethodSig, std::less<>>;

/// Assignable variables of a block, used to treat a block reference opaquely.
struct BlockFrame {
  std::vector<VarDecl> accessible;
  std::vector<VarDecl> assignable;
};

struct WpContext {
  const MethodTable* methods = nullptr;
  std::map<std::string, BlockFrame, std::less<>> frames;
  /// Sorts of every program variable in scope, locals included.
  std::map<std::string, Type, std::less<>> types;
  /// Names fresh variables must avoid; grows as fresh names are drawn.
  NameSet taken;
};

/// A loop side condition: hypothesis => conclusion over the program
/// variables plus `extra` (the rigid variant snapshot).
struct WpSide {
  std::string label;
  Predicate hypothesis;
  Predicate conclusion;
  std::vector<VarDecl> extra;
};

struct WpResult {
  Predicate pre;
  std::vector<WpSide> sides;
};

/// Throws WpError for abstract statements, unknown methods, block references
/// without a frame and assignments to undeclared variables.
WpResult wp(const Statement& s, const Predicate& q, WpContext& ctx);

/// Replaces each old(x) in `q` by a fresh ghost variable; returns the frozen
/// predicate and the (x, ghost) pairs so callers can assume ghost == x.
std::pair<Predicate, std::vector<std::pair<std::string, std::string>>> freeze_old(
    const Predicate& q, NameSet& taken);

}  // namespace cbc
