#pragma once

// Bounded semantics of expressions, predicates and concrete statements.
// Partial operations (tail of an empty sequence, out-of-range get, division
// by zero, int64 overflow) raise EvalError.

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cbc/kernel/ast.hpp"
#include "cbc/kernel/value.hpp"

namespace cbc {

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Getter names of each instantiable class, in constructor-argument order.
using ClassSchemas = std::map<std::string, std::vector<std::string>, std::less<>>;

/// Scoped variable bindings; later bindings shadow earlier ones.
class Env {
 public:
  void push(std::string name, Value v) { slots_.emplace_back(std::move(name), std::move(v)); }
  void pop() { slots_.pop_back(); }
  const Value* find(std::string_view name) const;
  Value& set(const std::string& name, Value v);
  std::size_t size() const { return slots_.size(); }
  void truncate(std::size_t n) { slots_.resize(n); }
  const std::vector<std::pair<std::string, Value>>& slots() const { return slots_; }

 private:
  std::vector<std::pair<std::string, Value>> slots_;
};

struct Bounds {
  std::int64_t int_bound = 4;
  std::int64_t max_seq_len = 3;
  std::int64_t seq_elem_bound = 2;
};

/// Evaluation context: `old_env` answers old(x) (falls back to the current
/// environment when absent); `schemas` resolves getter calls on objects.
struct EvalContext {
  const Env* old_env = nullptr;
  const ClassSchemas* schemas = nullptr;
  Bounds bounds;
};

Value eval(const Expr& e, const Env& env, const EvalContext& ctx = {});
/// Left-to-right, short-circuiting; quantifiers stop at the first false body.
bool holds(const Predicate& p, Env& env, const EvalContext& ctx = {});

std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_sub(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);
/// Euclidean division: the remainder is always non-negative.
std::int64_t euclid_div(std::int64_t a, std::int64_t b);

/// Every value of the sort within the bounds, in enumeration order:
/// integers ascending, false before true, sequences shortlex, objects by
/// their field tuples.
std::vector<Value> enumerate_values(const Type& t, const Bounds& b,
                                    const std::map<std::string, std::vector<Type>, std::less<>>&
                                        field_types = {});

/// Resolves the callee of a method call statement to an executable body.
using CallHandler =
    std::function<Value(const std::string& method, const std::vector<Value>& args)>;

struct ExecError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Runs a concrete statement. Selection takes the first enabled branch and
/// fails when none is enabled; loops consume one unit of `fuel` per
/// iteration. Abstract statements and block references cannot run.
void exec(const Statement& s, Env& env, const EvalContext& ctx, const CallHandler& calls,
          long& fuel);

}  // namespace cbc
