#pragma once

// The trait calculus: trait tables, combined typing and verification,
// specification-aware composition, flattening and a small-step interpreter.
//
// Method bodies and specifications reuse the kernel's expressions and
// predicates. Num, Bool and List are the kernel's built-in sorts; every other
// type name denotes a trait, interface or class of the table.

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cbc/kernel/ast.hpp"
#include "cbc/kernel/value.hpp"
#include "cbc/prover/obligation.hpp"

namespace cbc::traits {

struct Param {
  std::string name;
  Type type;
  bool operator==(const Param&) const = default;
};

struct Method {
  Contract spec;
  Type ret;
  std::string name;
  std::vector<Param> params;
  std::optional<Expr> body;
  /// Decreasing measure required by directly recursive bodies.
  std::optional<Expr> measure;

  bool is_abstract() const { return !body.has_value(); }
  /// Zero-argument abstract method.
  bool is_getter() const { return !body && params.empty(); }
  bool operator==(const Method&) const = default;
};

struct Body {
  bool is_interface = false;
  std::vector<std::string> interfaces;
  std::vector<Method> methods;

  const Method* find(std::string_view name) const;
  bool operator==(const Body&) const = default;
};

struct TraitExprNode;
using TraitExpr = std::shared_ptr<const TraitExprNode>;

namespace texpr {
struct Lit {
  Body body;
};
struct Ref {
  std::string name;
};
struct Plus {
  TraitExpr lhs;
  TraitExpr rhs;
};
struct MakeAbstract {
  TraitExpr inner;
  std::string method;
};
}  // namespace texpr

struct TraitExprNode {
  std::variant<texpr::Lit, texpr::Ref, texpr::Plus, texpr::MakeAbstract> v;
};

TraitExpr lit(Body b);
TraitExpr ref(std::string name);
TraitExpr plus(TraitExpr lhs, TraitExpr rhs);
TraitExpr make_abstract(TraitExpr inner, std::string method);

struct Decl {
  std::string name;
  bool is_class = false;
  TraitExpr expr;
  /// file:line:col of the declaration, when parsed.
  std::string where;
};

/// Declarations in source order. Lookup returns the first declaration of a
/// name; duplicates are reported by well_formed.
struct TraitTable {
  std::vector<Decl> decls;
  const Decl* find(std::string_view name) const;
};

struct TraitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
/// Two concrete methods of the same name.
struct ConflictError : TraitError {
  using TraitError::TraitError;
};
/// Neither specification refines the other. `counterexample` falsifies the
/// first failing implication.
struct SpecIncompatible : TraitError {
  SpecIncompatible(const std::string& msg, Assignment cex)
      : TraitError(msg), counterexample(std::move(cex)) {}
  Assignment counterexample;
};
struct TraitTypeError : TraitError {
  using TraitError::TraitError;
};
/// A closed non-value term with no reduction.
struct StuckError : TraitError {
  using TraitError::TraitError;
};
struct FuelExhausted : TraitError {
  using TraitError::TraitError;
};

struct Diagnostic {
  std::string where;
  std::string message;
};

std::vector<Diagnostic> well_formed(const TraitTable& ds);

struct FlatDecl {
  std::string name;
  bool is_class = false;
  Body body;
};

struct FlatTable {
  std::vector<FlatDecl> decls;

  const FlatDecl* find(std::string_view name) const;
  const Method* method(std::string_view owner, std::string_view m) const;
  /// Zero-argument abstract methods in declaration order: the constructor
  /// arguments of a class.
  std::vector<const Method*> getters(std::string_view owner) const;
  /// Reflexive-transitive closure of declared interface implementation.
  bool instance_of(std::string_view sub, std::string_view super) const;
  bool subtype(const Type& sub, const Type& super) const;
};

using Gamma = std::map<std::string, Type, std::less<>>;

/// Judgment Γ ⊢ e : C ⊣ knowledge ⊨ obligation. The knowledge describes
/// `result`; `fresh` declares the variables introduced for call results.
struct Typed {
  Type type;
  Predicate knowledge;
  Predicate obligation;
  std::vector<VarDecl> fresh;
};

Typed type_expr(const Gamma& gamma, const Expr& e, const FlatTable& ds);

/// The single verification condition of a concrete method. Throws
/// TraitTypeError when the body does not type check.
Obligation method_obligation(const FlatTable& ds, const std::string& owner, const Method& m);

/// Abstract methods are valid; type errors yield Unknown with the message.
ProofResult verify_method(const FlatTable& ds, const std::string& owner, const Method& m,
                          const ProverConfig& cfg = {});

struct MethodCheck {
  std::string owner;
  std::string method;
  ProofResult result;
};

struct BodyCheck {
  std::vector<MethodCheck> methods;
  bool ok() const;
  std::vector<std::string> failed() const;
};

BodyCheck check_body(const FlatTable& ds, const std::string& owner, const Body& body,
                     const ProverConfig& cfg = {});

/// One Liskov pair: Pre(S') => Pre(S) and Post(S) => Post(S'), where S is
/// the specification that survives the composition.
struct CompositionCheck {
  std::string owner;
  std::string method;
  ProofResult pre;
  ProofResult post;
  bool ok() const { return pre.is_valid() && post.is_valid(); }
};

/// Where compositions happen: `owner` types `this`, `table` supplies
/// getter sorts of object-typed variables, `log` records every pair checked.
struct ComposeEnv {
  std::string owner;
  const FlatTable* table = nullptr;
  ProverConfig cfg;
  std::vector<CompositionCheck>* log = nullptr;
};

Method compose_method(const Method& m1, const Method& m2, const ComposeEnv& env = {});
Body compose_bodies(const Body& b1, const Body& b2, const ComposeEnv& env = {});
/// Throws TraitError when m is absent.
Body make_abstract(const Body& b, const std::string& m);
std::vector<Method> all_meth(const std::string& m, const std::vector<Body>& bodies);

struct Flattening {
  FlatTable table;
  std::vector<CompositionCheck> compositions;
  std::vector<MethodCheck> verifications;
  std::vector<Diagnostic> errors;
  bool ok() const { return errors.empty(); }
};

/// Two passes: compose every declaration (checking specification
/// refinement), then verify each body literal against the completed table
/// and check that classes only leave getters abstract.
Flattening flatten_table(const TraitTable& ds, const ProverConfig& cfg = {});

bool is_value(const Expr& e);
/// One reduction step; a value is returned unchanged.
Expr step(const FlatTable& ds, const Expr& e);

struct Evaluation {
  Value value;
  long steps = 0;
};

Evaluation evaluate(const FlatTable& ds, const Expr& e, long fuel = 100000);

}  // namespace cbc::traits
