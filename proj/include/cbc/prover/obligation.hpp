#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cbc/kernel/ast.hpp"
#include "cbc/kernel/eval.hpp"
#include "cbc/kernel/value.hpp"

namespace cbc {

struct VarDecl {
  std::string name;
  Type type;
  bool operator==(const VarDecl&) const = default;
};

/// Getters (name, sort) of each class an object-sorted variable may hold,
/// in constructor order.
using ClassFields = std::map<std::string, std::vector<VarDecl>, std::less<>>;

/// A named implication hypothesis => conclusion. `vars` lists every free
/// variable with its sort; its order is the enumeration order.
struct Obligation {
  std::string id;
  Predicate hypothesis;
  Predicate conclusion;
  std::string provenance;
  std::vector<VarDecl> vars;
  ClassFields classes;
};

struct ProverConfig {
  std::int64_t int_bound = 4;
  std::int64_t max_seq_len = 3;
  std::int64_t seq_elem_bound = 2;

  Bounds bounds() const { return {int_bound, max_seq_len, seq_elem_bound}; }
};

using Assignment = std::vector<std::pair<std::string, Value>>;

struct ProofResult {
  enum class Kind { Valid, Invalid, Unknown };
  Kind kind = Kind::Valid;
  Assignment counterexample;
  std::string reason;

  static ProofResult valid() { return {}; }
  static ProofResult invalid(Assignment cex) { return {Kind::Invalid, std::move(cex), {}}; }
  static ProofResult unknown(std::string why, Assignment at = {}) {
    return {Kind::Unknown, std::move(at), std::move(why)};
  }
  bool is_valid() const { return kind == Kind::Valid; }
  bool operator==(const ProofResult&) const = default;
};

const char* to_string(ProofResult::Kind k);
/// `{x: -4, l: [1, 2]}`
std::string format_assignment(const Assignment& a);

/// Bounded validity check. Enumerates the variables of `ob.vars` in order
/// (integers ascending from -int_bound, sequences shortlex); the first state
/// satisfying the hypothesis and not the conclusion decides the result:
/// Invalid when the conclusion is false there, Unknown when it is undefined.
/// States in which the hypothesis is false or undefined are skipped.
ProofResult check_implication(const Obligation& ob, const ProverConfig& cfg = {});

/// Evaluates hypothesis => conclusion at one assignment (for re-checking
/// counterexamples). Throws EvalError when undefined.
bool holds_at(const Obligation& ob, const Assignment& at, const ProverConfig& cfg = {});

}  // namespace cbc
